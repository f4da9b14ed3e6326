"""
Experiment configuration: defaults, strict file parsing, unit conversion.

Config files are INI-style with the fixed sections [geometry], [scenario],
[traffic], [fbl], [ga] and [sweep]. Every key has a default matching the
reference simulation setup, so an empty file (or no file) is a complete
configuration. Unknown sections or keys are rejected. Key names carry their
unit (db, dbm, m, hz, s, w, rad, bytes); values are converted to linear SI
at load time and the package computes in SI throughout.
"""

import hashlib
import math
from configparser import ConfigParser, Error as ConfigParserError
from dataclasses import dataclass
from math import isqrt
from pathlib import Path

from .channel import Direction, LinkScenario, RisGeometry
from .link import NoiseConfig
from .optimizer import ConstraintSet, GaSettings
from .traffic import TrafficParams
from .units import db_to_linear


class ConfigError(Exception):
    """Base class for configuration problems (CLI exit code 1)."""


class ConfigNotFoundError(ConfigError):
    pass


class ConfigSyntaxError(ConfigError):
    pass


class UnknownKeyError(ConfigError):
    pass


class ConfigValueError(ConfigError):
    pass


class NonSquareGeometryError(ConfigError):
    """An element count that cannot form a square array where one is required."""


# ----------------------------------------------------------------------------
#  Schema: section -> key -> default raw string. Raw values are kept for the
#  canonical config echo / hash; parsing happens against this table only.
# ----------------------------------------------------------------------------

SCHEMA: dict[str, dict[str, str]] = {
    "geometry": {
        "n_elements": "16",          # square array, rows = cols = sqrt(N)
        "n_rows": "",                # optional explicit rectangle
        "n_cols": "",
        "spacing_h": "0.25",
        "spacing_v": "0.25",
        "carrier_freq_hz": "28e9",
    },
    "scenario": {
        "path_gain_db": "30",
        "path_loss_exp": "2",
        "dist_ris_bs_m": "4",
        "dist_ris_ue_m": "20, 25",
        "dist_jammer_m": "30",
        "dist_ris_jammer_m": "",     # empty: reuse dist_jammer_m
        "bs_azimuth_rad": str(math.pi / 6),
        "bs_elevation_rad": "0",
        "user_azimuth_rad": str(math.pi / 2),
        "user_elevation_rad": str(2 * math.pi),
        "jammer_azimuth_rad": str(math.pi / 4),
        "jammer_elevation_rad": str(math.pi / 2),
        "jammer_power_w": "5e-3",
        "ris_noise_dbm": "-100",
        "awgn_dbm": "-100",
        "report_ris_power": "false",
    },
    "traffic": {
        "arrival_rate_per_s": "500",
        "retransmissions": "10",
        "header_time_s": "30e-6",
        "bandwidth_hz": "180e3",
    },
    "fbl": {
        "blocklength": "108",
        "payload_bytes": "32",
    },
    "ga": {
        "population_size": "200",
        "max_generations": "100",
        "crossover_rate": "0.9",
        "mutation_rate": "auto",     # auto: one expected mutation per genome
        "elite_count": "2",
        "rng_seed": "12345",
        "constraint_tolerance": "1e-30",
        "function_tolerance": "1e-30",
        "co_phasing_fraction": "0.1",
        "mutation_sigma": "0.1",
        "mutation_decay": "0.99",
        "stall_generations": "50",
        "delay_thr_s": "1e-3",
        "rel_thr": "0.99999",
        "beta_max": "100",
        "p_max_w": "0.1",
        "p_min_w": "1e-6",
        "l_max": "10",
        "nb_min": "1",
        "nb_max": "1000",
    },
    "sweep": {
        "kind": "delay-ee",
        "blocklength_grid": "60:300:12",
        "arrival_rate_grid": "100:1300:200",
        "beta_grid": "0:50:0.1",
        "n_elements_grid": "",       # empty: kind-specific default
        "blocklength": "360",        # fixed code length for the rel-beta sweep
        "retransmissions": "1",      # delay-ee sweep replica count
        "policy": "cophased",
        "policy_power_w": "2.45e-3",
        "policy_beta_total": "100",
        "cophase_user": "auto",      # auto: plotted user of the sweep kind
    },
}

PRESETS: dict[str, dict[tuple[str, str], str]] = {
    "desk": {
        ("geometry", "n_elements"): "16",
        ("ga", "population_size"): "200",
        ("ga", "max_generations"): "100",
    },
    "paper": {
        ("geometry", "n_elements"): "400",
        ("ga", "population_size"): "2000",
        ("ga", "max_generations"): "200",
    },
}

SWEEP_KINDS = ("delay-ee", "rel-beta", "sjnr-n")

# Default element-count grids per sweep kind (all perfect squares).
DEFAULT_N_GRID = {
    "rel-beta": (4, 100, 400, 900),
    "sjnr-n": (4, 16, 36, 64, 100, 196, 400, 625, 900),
    "delay-ee": (),
}


@dataclass(frozen=True)
class SweepSpec:
    kind: str
    blocklength_grid: tuple[int, ...]
    arrival_rate_grid: tuple[float, ...]
    beta_grid: tuple[float, ...]
    n_elements_grid: tuple[int, ...] | None
    blocklength: int
    retransmissions: int
    policy: str
    policy_power_w: float
    policy_beta_total: float
    cophase_user: int | None

    def element_grid(self, kind: str | None = None) -> tuple[int, ...]:
        """Configured element-count grid, or the default of the given sweep kind."""
        if self.n_elements_grid is not None:
            return self.n_elements_grid
        return DEFAULT_N_GRID[kind if kind is not None else self.kind]


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved experiment setup in SI units."""

    geometry: RisGeometry
    scenario: LinkScenario
    noise: NoiseConfig
    traffic: TrafficParams
    header_time: float
    bandwidth: float
    blocklength: int
    payload_bits: int
    ga: GaSettings
    constraints: ConstraintSet
    sweep: SweepSpec
    report_ris_power: bool
    output_dir: Path
    seed: int
    raw: tuple[tuple[str, str, str], ...]  # (section, key, raw value), canonical order

    def echo_text(self) -> str:
        """Canonical key=value rendering of the effective configuration."""
        lines = []
        current = None
        for section, key, value in self.raw:
            if section != current:
                if current is not None:
                    lines.append("")
                lines.append(f"[{section}]")
                current = section
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    @property
    def config_hash(self) -> str:
        digest = hashlib.sha256(self.echo_text().encode()).hexdigest()[:16]
        return f"sha256:{digest}"


# ----------------------------------------------------------------------------
#  Value parsers
# ----------------------------------------------------------------------------

def _parse_float(section: str, key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError as exc:
        raise ConfigValueError(f"[{section}] {key}: not a number: {value!r}") from exc


def _parse_int(section: str, key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigValueError(f"[{section}] {key}: not an integer: {value!r}") from exc


def _parse_bool(section: str, key: str, value: str) -> bool:
    if value in ("true", "false"):
        return value == "true"
    raise ConfigValueError(f"[{section}] {key}: expected true or false, got {value!r}")


def _parse_float_list(section: str, key: str, value: str) -> tuple[float, ...]:
    parts = [p.strip() for p in value.split(",") if p.strip()]
    if not parts:
        raise ConfigValueError(f"[{section}] {key}: empty list")
    return tuple(_parse_float(section, key, p) for p in parts)


def _parse_grid(section: str, key: str, value: str, as_int: bool = False):
    """Parse 'start:stop:step' (stop inclusive) or a comma-separated list."""
    if ":" in value:
        parts = value.split(":")
        if len(parts) != 3:
            raise ConfigValueError(f"[{section}] {key}: grid must be start:stop:step")
        start, stop, step = (_parse_float(section, key, p) for p in parts)
        if step <= 0 or stop < start:
            raise ConfigValueError(f"[{section}] {key}: need step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = tuple(start + i * step for i in range(count))
    else:
        values = _parse_float_list(section, key, value)
    if as_int:
        out = []
        for v in values:
            if abs(v - round(v)) > 1e-9:
                raise ConfigValueError(f"[{section}] {key}: expected integers, got {v}")
            out.append(int(round(v)))
        return tuple(out)
    return values


def _broadcast(section: str, key: str, values: tuple, n_users: int) -> tuple:
    if len(values) == 1:
        return values * n_users
    if len(values) == n_users:
        return values
    raise ConfigValueError(
        f"[{section}] {key}: expected 1 or {n_users} values, got {len(values)}")


def _square_side(n_elements: int) -> int:
    side = isqrt(n_elements)
    if side * side != n_elements:
        raise NonSquareGeometryError(
            f"element count {n_elements} is not a perfect square; "
            "give n_rows and n_cols explicitly for a rectangular array")
    return side


def square_geometry(n_elements: int, spacing_h: float = 0.25,
                    spacing_v: float = 0.25, carrier_freq: float = 28e9) -> RisGeometry:
    """Square RIS with rows = cols = sqrt(n_elements)."""
    side = _square_side(n_elements)
    return RisGeometry(side, side, spacing_h, spacing_v, carrier_freq)


# ----------------------------------------------------------------------------
#  Loading
# ----------------------------------------------------------------------------

def _read_file_items(path: Path) -> dict[tuple[str, str], str]:
    if not path.exists():
        raise ConfigNotFoundError(f"config file not found: {path}")
    parser = ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as handle:
            parser.read_file(handle)
    except ConfigParserError as exc:
        raise ConfigSyntaxError(f"malformed config {path}: {exc}") from exc
    items: dict[tuple[str, str], str] = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise UnknownKeyError(f"unknown config section [{section}]")
        for key, value in parser.items(section):
            if key not in SCHEMA[section]:
                raise UnknownKeyError(f"unknown key '{key}' in section [{section}]")
            items[(section, key)] = value.strip()
    return items


def load_config(path: str | Path | None = None, preset: str | None = None,
                seed: int | None = None,
                output_dir: str | Path = "results") -> ExperimentConfig:
    """Resolve defaults, preset, file and CLI overrides into a typed config.

    Precedence (lowest to highest): built-in defaults, preset, config file,
    explicit ``seed``.
    """
    effective: dict[tuple[str, str], str] = {
        (section, key): default
        for section, keys in SCHEMA.items()
        for key, default in keys.items()
    }
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigValueError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        effective.update(PRESETS[preset])
    if path is not None:
        effective.update(_read_file_items(Path(path)))
    if seed is not None:
        effective[("ga", "rng_seed")] = str(int(seed))

    get = lambda section, key: effective[(section, key)]

    # -- geometry ------------------------------------------------------------
    rows_raw = get("geometry", "n_rows")
    cols_raw = get("geometry", "n_cols")
    spacing_h = _parse_float("geometry", "spacing_h", get("geometry", "spacing_h"))
    spacing_v = _parse_float("geometry", "spacing_v", get("geometry", "spacing_v"))
    carrier = _parse_float("geometry", "carrier_freq_hz", get("geometry", "carrier_freq_hz"))
    if rows_raw or cols_raw:
        if not (rows_raw and cols_raw):
            raise ConfigValueError("[geometry] n_rows and n_cols must be given together")
        geometry = RisGeometry(_parse_int("geometry", "n_rows", rows_raw),
                               _parse_int("geometry", "n_cols", cols_raw),
                               spacing_h, spacing_v, carrier)
    else:
        n_elements = _parse_int("geometry", "n_elements", get("geometry", "n_elements"))
        geometry = square_geometry(n_elements, spacing_h, spacing_v, carrier)

    # -- scenario ------------------------------------------------------------
    dist_ue = _parse_float_list("scenario", "dist_ris_ue_m", get("scenario", "dist_ris_ue_m"))
    n_users = len(dist_ue)
    user_az = _broadcast("scenario", "user_azimuth_rad",
                         _parse_float_list("scenario", "user_azimuth_rad",
                                           get("scenario", "user_azimuth_rad")), n_users)
    user_el = _broadcast("scenario", "user_elevation_rad",
                         _parse_float_list("scenario", "user_elevation_rad",
                                           get("scenario", "user_elevation_rad")), n_users)
    ris_jam_raw = get("scenario", "dist_ris_jammer_m")
    try:
        scenario = LinkScenario(
            path_gain_ref=db_to_linear(_parse_float("scenario", "path_gain_db",
                                                    get("scenario", "path_gain_db"))),
            path_loss_exp=_parse_float("scenario", "path_loss_exp",
                                       get("scenario", "path_loss_exp")),
            dist_ris_bs=_parse_float("scenario", "dist_ris_bs_m",
                                     get("scenario", "dist_ris_bs_m")),
            dist_ris_ue=dist_ue,
            dist_jammer=_parse_float("scenario", "dist_jammer_m",
                                     get("scenario", "dist_jammer_m")),
            dir_bs=Direction(_parse_float("scenario", "bs_azimuth_rad",
                                          get("scenario", "bs_azimuth_rad")),
                             _parse_float("scenario", "bs_elevation_rad",
                                          get("scenario", "bs_elevation_rad"))),
            dir_jammer=Direction(_parse_float("scenario", "jammer_azimuth_rad",
                                              get("scenario", "jammer_azimuth_rad")),
                                 _parse_float("scenario", "jammer_elevation_rad",
                                              get("scenario", "jammer_elevation_rad"))),
            dir_users=tuple(Direction(a, e) for a, e in zip(user_az, user_el)),
            jammer_power=_parse_float("scenario", "jammer_power_w",
                                      get("scenario", "jammer_power_w")),
            dist_ris_jammer=(None if not ris_jam_raw
                             else _parse_float("scenario", "dist_ris_jammer_m", ris_jam_raw)),
        )
        noise = NoiseConfig.from_dbm(
            _parse_float("scenario", "ris_noise_dbm", get("scenario", "ris_noise_dbm")),
            _parse_float("scenario", "awgn_dbm", get("scenario", "awgn_dbm")))
    except ValueError as exc:
        raise ConfigValueError(f"invalid scenario: {exc}") from exc

    # -- traffic / fbl ---------------------------------------------------------
    rates = _broadcast("traffic", "arrival_rate_per_s",
                       _parse_float_list("traffic", "arrival_rate_per_s",
                                         get("traffic", "arrival_rate_per_s")), n_users)
    try:
        traffic = TrafficParams(rates, _parse_int("traffic", "retransmissions",
                                                  get("traffic", "retransmissions")))
    except ValueError as exc:
        raise ConfigValueError(f"invalid traffic: {exc}") from exc
    header_time = _parse_float("traffic", "header_time_s", get("traffic", "header_time_s"))
    bandwidth = _parse_float("traffic", "bandwidth_hz", get("traffic", "bandwidth_hz"))
    if header_time < 0 or bandwidth <= 0:
        raise ConfigValueError("[traffic] header time must be >= 0 and bandwidth > 0")
    blocklength = _parse_int("fbl", "blocklength", get("fbl", "blocklength"))
    payload_bits = 8 * _parse_int("fbl", "payload_bytes", get("fbl", "payload_bytes"))
    if blocklength < 1 or payload_bits < 8:
        raise ConfigValueError("[fbl] blocklength and payload must be positive")

    # -- ga / constraints ------------------------------------------------------
    mut_raw = get("ga", "mutation_rate")
    try:
        ga = GaSettings(
            population_size=_parse_int("ga", "population_size", get("ga", "population_size")),
            max_generations=_parse_int("ga", "max_generations", get("ga", "max_generations")),
            crossover_rate=_parse_float("ga", "crossover_rate", get("ga", "crossover_rate")),
            mutation_rate=(None if mut_raw == "auto"
                           else _parse_float("ga", "mutation_rate", mut_raw)),
            elite_count=_parse_int("ga", "elite_count", get("ga", "elite_count")),
            rng_seed=_parse_int("ga", "rng_seed", get("ga", "rng_seed")),
            constraint_tolerance=_parse_float("ga", "constraint_tolerance",
                                              get("ga", "constraint_tolerance")),
            function_tolerance=_parse_float("ga", "function_tolerance",
                                            get("ga", "function_tolerance")),
            co_phasing_fraction=_parse_float("ga", "co_phasing_fraction",
                                             get("ga", "co_phasing_fraction")),
            mutation_sigma=_parse_float("ga", "mutation_sigma", get("ga", "mutation_sigma")),
            mutation_decay=_parse_float("ga", "mutation_decay", get("ga", "mutation_decay")),
            stall_generations=_parse_int("ga", "stall_generations",
                                         get("ga", "stall_generations")),
        )
        constraints = ConstraintSet(
            delay_thr=_parse_float("ga", "delay_thr_s", get("ga", "delay_thr_s")),
            rel_thr=_parse_float("ga", "rel_thr", get("ga", "rel_thr")),
            beta_max=_parse_float("ga", "beta_max", get("ga", "beta_max")),
            p_max=_parse_float("ga", "p_max_w", get("ga", "p_max_w")),
            l_max=_parse_int("ga", "l_max", get("ga", "l_max")),
            p_min=_parse_float("ga", "p_min_w", get("ga", "p_min_w")),
            nb_min=_parse_int("ga", "nb_min", get("ga", "nb_min")),
            nb_max=_parse_int("ga", "nb_max", get("ga", "nb_max")),
        )
    except ValueError as exc:
        raise ConfigValueError(f"invalid ga settings: {exc}") from exc

    # -- sweep -----------------------------------------------------------------
    kind = get("sweep", "kind")
    if kind not in SWEEP_KINDS:
        raise ConfigValueError(f"[sweep] kind must be one of {SWEEP_KINDS}, got {kind!r}")
    n_grid_raw = get("sweep", "n_elements_grid")
    n_grid = None
    if n_grid_raw:
        n_grid = _parse_grid("sweep", "n_elements_grid", n_grid_raw, as_int=True)
        for n in n_grid:
            _square_side(n)
    cophase_raw = get("sweep", "cophase_user")
    policy = get("sweep", "policy")
    if policy not in ("cophased", "ga"):
        raise ConfigValueError(f"[sweep] policy must be 'cophased' or 'ga', got {policy!r}")
    sweep = SweepSpec(
        kind=kind,
        blocklength_grid=_parse_grid("sweep", "blocklength_grid",
                                     get("sweep", "blocklength_grid"), as_int=True),
        arrival_rate_grid=_parse_grid("sweep", "arrival_rate_grid",
                                      get("sweep", "arrival_rate_grid")),
        beta_grid=_parse_grid("sweep", "beta_grid", get("sweep", "beta_grid")),
        n_elements_grid=n_grid,
        blocklength=_parse_int("sweep", "blocklength", get("sweep", "blocklength")),
        retransmissions=_parse_int("sweep", "retransmissions",
                                   get("sweep", "retransmissions")),
        policy=policy,
        policy_power_w=_parse_float("sweep", "policy_power_w",
                                    get("sweep", "policy_power_w")),
        policy_beta_total=_parse_float("sweep", "policy_beta_total",
                                       get("sweep", "policy_beta_total")),
        cophase_user=(None if cophase_raw == "auto"
                      else _parse_int("sweep", "cophase_user", cophase_raw)),
    )
    if sweep.cophase_user is not None and not 1 <= sweep.cophase_user <= n_users:
        raise ConfigValueError(f"[sweep] cophase_user out of range 1..{n_users}")

    raw_canonical = tuple(
        (section, key, effective[(section, key)])
        for section in SCHEMA
        for key in SCHEMA[section]
    )
    return ExperimentConfig(
        geometry=geometry,
        scenario=scenario,
        noise=noise,
        traffic=traffic,
        header_time=header_time,
        bandwidth=bandwidth,
        blocklength=blocklength,
        payload_bits=payload_bits,
        ga=ga,
        constraints=constraints,
        sweep=sweep,
        report_ris_power=_parse_bool("scenario", "report_ris_power",
                                     get("scenario", "report_ris_power")),
        output_dir=Path(output_dir),
        seed=ga.rng_seed,
        raw=raw_canonical,
    )
