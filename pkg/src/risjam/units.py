"""Unit conversions. All internal math runs in linear SI units."""

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact SI value


def db_to_linear(value_db: float) -> float:
    """Power ratio from dB (30 dB -> 1000)."""
    return 10.0 ** (value_db / 10.0)


def dbm_to_watts(value_dbm: float) -> float:
    """Power in watts from dBm (-100 dBm -> 1e-13 W)."""
    return 10.0 ** ((value_dbm - 30.0) / 10.0)
