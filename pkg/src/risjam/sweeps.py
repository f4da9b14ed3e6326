"""
Experiment sweeps, flat-file persistence and the optimization driver.

Each sweep walks a configured grid with a deterministic beamforming policy
(phases co-phased to the plotted user's cascade, uniform amplitudes) and
emits plot-ready rows. Results serialize to CSV with a few metadata comment
lines (config hash, seed, version, timestamp); re-running with the same
config and seed reproduces every byte except the timestamp.
"""

import csv
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from ._version import __version__
from .config import ExperimentConfig, square_geometry
from .link import BeamformConfig, FblCode, PowerAllocation, bler, co_phasing_phases
from .model import SystemModel
from .optimizer import OptimizationResult, run_ga

DELAY_EE_COLUMNS = ("arrival_rate_per_s", "blocklength", "utilization",
                    "mean_delay_s", "energy_efficiency_bits_per_j")
REL_BETA_COLUMNS = ("n_elements", "amplitude", "reliability")
SJNR_N_COLUMNS = ("n_elements", "sjnr_user1", "growth_ratio")
CONVERGENCE_COLUMNS = ("generation", "best_objective", "mean_objective",
                       "feasible_fraction")

# Reference readings recorded next to our own results for comparison; these
# depend on unpublished per-point optimizer state and are never asserted.
# Two mutually inconsistent growth readings circulate for the element sweep
# (an overall 13.64% and the 0.61 -> 4.47 endpoints); both are recorded.
REFERENCE_REL_BETA_THRESHOLDS = {4: 43.7, 400: 2.1}
REFERENCE_SJNR = {4: 0.61, 400: 4.47}
REFERENCE_SJNR_GROWTH_PERCENT = 13.64

UNSTABLE_MARKER = "unstable"


@dataclass
class SweepResult:
    """Grid rows plus run metadata; round-trips through CSV unchanged."""

    kind: str
    columns: tuple[str, ...]
    rows: list[tuple]
    metadata: dict[str, str]


# ----------------------------------------------------------------------------
#  Model construction and the fixed beamforming policy
# ----------------------------------------------------------------------------

def build_model(cfg: ExperimentConfig, geometry=None) -> SystemModel:
    """System model for the configured scenario (optionally a swept geometry)."""
    return SystemModel(
        geometry if geometry is not None else cfg.geometry,
        cfg.scenario, cfg.noise, cfg.header_time, cfg.bandwidth,
        cfg.payload_bits, cfg.traffic.arrival_rates)


def _policy_powers(cfg: ExperimentConfig) -> PowerAllocation:
    return PowerAllocation((cfg.sweep.policy_power_w,) * cfg.scenario.n_users)


def _policy_user(cfg: ExperimentConfig, default: int) -> int:
    return cfg.sweep.cophase_user if cfg.sweep.cophase_user is not None else default


def _metadata(cfg: ExperimentConfig, kind: str) -> dict[str, str]:
    return {
        "kind": kind,
        "config_hash": cfg.config_hash,
        "seed": str(cfg.seed),
        "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }


def uniform_beta_sjnr(model: SystemModel, phases: np.ndarray, powers_w,
                      betas) -> np.ndarray:
    """Per-user SJNR for a grid of uniform per-element amplitudes.

    Equivalent to evaluating the SJNR one amplitude at a time but vectorized
    over the amplitude axis; returns shape (K, len(betas)).
    """
    betas = np.asarray(betas, dtype=float)
    row_unit = model.bs_channel * np.exp(1j * phases)
    s_users = model.ue_channels @ row_unit
    s_jam = row_unit @ model.jammer_channel
    unit_norm_sq = float(np.sum(np.abs(row_unit) ** 2))

    p = np.asarray(powers_w, dtype=float)[:, None]
    received = p * (np.abs(s_users) ** 2)[:, None] * betas[None, :]
    tail = np.vstack([np.cumsum(received[::-1], axis=0)[::-1][1:],
                      np.zeros_like(betas)])
    jamming = model.scenario.jammer_power * np.abs(
        model.jammer_direct + np.sqrt(betas) * s_jam) ** 2
    floor = (jamming + betas * unit_norm_sq * model.noise.ris_thermal_var
             + model.noise.awgn_var)
    return received / (tail + floor[None, :])


# ----------------------------------------------------------------------------
#  Sweeps
# ----------------------------------------------------------------------------

def sweep_delay_ee(cfg: ExperimentConfig) -> SweepResult:
    """Mean delay and energy efficiency over (arrival rate, blocklength).

    All users share the swept arrival rate. The replica count comes from
    [sweep] retransmissions (default 1, the value consistent with the
    reference delay numbers). Unstable points carry a marker instead of a
    delay.
    """
    model = build_model(cfg)
    n_users = model.n_users
    replicas = cfg.sweep.retransmissions
    beta_each = cfg.sweep.policy_beta_total / model.n_elements
    beam = model.co_phased_beam(_policy_user(cfg, n_users), beta_each)
    powers = _policy_powers(cfg)

    rows: list[tuple] = []
    for rate in sorted(cfg.sweep.arrival_rate_grid):
        for blocklength in sorted(cfg.sweep.blocklength_grid):
            report = model.evaluate(beam, powers, blocklength, replicas,
                                    arrival_rates=(rate,) * n_users)
            rho = report.utilization[0]
            if report.stable:
                rows.append((float(rate), int(blocklength), float(rho),
                             float(report.mean_delay[0]),
                             float(report.energy_efficiency)))
            else:
                rows.append((float(rate), int(blocklength), float(rho),
                             UNSTABLE_MARKER, None))

    metadata = _metadata(cfg, "delay-ee")
    delays = {(row[0], row[1]): row[3] for row in rows}
    low, high = delays.get((100.0, 108)), delays.get((1300.0, 108))
    if isinstance(low, float) and isinstance(high, float):
        # ratio between the two highlighted operating points, usually quoted
        # as a percentage
        metadata["delay_ratio_100_1300"] = repr(low / high)
    return SweepResult("delay-ee", DELAY_EE_COLUMNS, rows, metadata)


def sweep_reliability_vs_beta(cfg: ExperimentConfig) -> SweepResult:
    """Reliability against uniform RIS amplitude for each element count.

    Phases are co-phased to the plotted (last by default) user; the smallest
    grid amplitude reaching the reliability threshold is recorded per element
    count in the metadata, next to the reference readings.
    """
    betas = np.asarray(sorted(cfg.sweep.beta_grid), dtype=float)
    code = FblCode(cfg.sweep.blocklength, cfg.payload_bits)
    replicas = cfg.traffic.retransmissions
    metadata = _metadata(cfg, "rel-beta")

    rows: list[tuple] = []
    for n_elements in cfg.sweep.element_grid("rel-beta"):
        geometry = square_geometry(n_elements, cfg.geometry.spacing_h,
                                   cfg.geometry.spacing_v,
                                   cfg.geometry.carrier_freq)
        model = build_model(cfg, geometry)
        user = _policy_user(cfg, model.n_users)
        phases = co_phasing_phases(model.bs_channel, model.ue_channels[user - 1])
        gammas = uniform_beta_sjnr(model, phases,
                                   (cfg.sweep.policy_power_w,) * model.n_users,
                                   betas)
        omega = np.prod(1.0 - bler(gammas, code), axis=0)
        rel = 1.0 - (1.0 - omega) ** replicas

        reached = np.nonzero(rel >= cfg.constraints.rel_thr)[0]
        threshold = float(betas[reached[0]]) if reached.size else None
        metadata[f"threshold_beta_n{n_elements}"] = (
            "none" if threshold is None else repr(threshold))
        reference = REFERENCE_REL_BETA_THRESHOLDS.get(n_elements)
        if reference is not None:
            metadata[f"reference_threshold_beta_n{n_elements}"] = repr(reference)
        rows.extend((int(n_elements), float(b), float(r))
                    for b, r in zip(betas, rel))
    return SweepResult("rel-beta", REL_BETA_COLUMNS, rows, metadata)


def sweep_sjnr_vs_n(cfg: ExperimentConfig) -> SweepResult:
    """First user's SJNR against the RIS element count.

    The default policy co-phases to user 1 and spreads a constant total
    amplification uniformly over the elements; policy 'ga' runs the full
    optimizer per point instead. Consecutive growth ratios expose the
    plateau.
    """
    metadata = _metadata(cfg, "sjnr-n")
    metadata["reference_growth_percent"] = repr(REFERENCE_SJNR_GROWTH_PERCENT)
    rows: list[tuple] = []
    previous = None
    for n_elements in cfg.sweep.element_grid("sjnr-n"):
        geometry = square_geometry(n_elements, cfg.geometry.spacing_h,
                                   cfg.geometry.spacing_v,
                                   cfg.geometry.carrier_freq)
        model = build_model(cfg, geometry)
        if cfg.sweep.policy == "ga":
            result = run_ga(model, cfg.constraints, cfg.ga)
            gamma_1 = float(result.best_report.sjnr[0])
        else:
            beam = model.co_phased_beam(
                _policy_user(cfg, 1),
                cfg.sweep.policy_beta_total / model.n_elements)
            gamma_1 = float(model.sjnr(beam, _policy_powers(cfg))[0])
        growth = None if previous is None else float(gamma_1 / previous)
        rows.append((int(n_elements), gamma_1, growth))
        previous = gamma_1
        reference = REFERENCE_SJNR.get(n_elements)
        if reference is not None:
            metadata[f"reference_sjnr_n{n_elements}"] = repr(reference)
    return SweepResult("sjnr-n", SJNR_N_COLUMNS, rows, metadata)


# ----------------------------------------------------------------------------
#  CSV persistence
# ----------------------------------------------------------------------------

def _encode_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _decode_cell(text: str):
    if text == "":
        return None
    if re.fullmatch(r"-?\d+", text):
        return int(text)
    try:
        return float(text)
    except ValueError:
        return text


def write_sweep_csv(result: SweepResult, path: str | Path) -> Path:
    """Write metadata comment lines, a header row, then the data rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as handle:
        for key, value in result.metadata.items():
            handle.write(f"# {key}={value}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(result.columns)
        for row in result.rows:
            writer.writerow([_encode_cell(cell) for cell in row])
    return path


def read_sweep_csv(path: str | Path) -> SweepResult:
    metadata: dict[str, str] = {}
    with open(path, newline="") as handle:
        data_lines = []
        for line in handle:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                metadata[key.strip()] = value
            else:
                data_lines.append(line)
    reader = csv.reader(data_lines)
    columns = tuple(next(reader))
    rows = [tuple(_decode_cell(cell) for cell in row) for row in reader]
    return SweepResult(metadata.get("kind", ""), columns, rows, metadata)


# ----------------------------------------------------------------------------
#  Optimization driver and the solution record
# ----------------------------------------------------------------------------

def write_convergence_csv(result: OptimizationResult, cfg: ExperimentConfig,
                          path: str | Path) -> Path:
    """Per-generation trace; deliberately timestamp-free so identical seeds
    reproduce identical bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as handle:
        handle.write(f"# kind=convergence\n")
        handle.write(f"# config_hash={cfg.config_hash}\n")
        handle.write(f"# seed={cfg.seed}\n")
        handle.write(f"# version={__version__}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CONVERGENCE_COLUMNS)
        for gen, (best, mean, frac) in enumerate(
                zip(result.fitness_history, result.mean_history,
                    result.feasible_fraction_history), start=1):
            writer.writerow([gen, repr(best), repr(mean), repr(frac)])
    return path


def _encode_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        encoded = ",".join(_encode_value(v) for v in value)
        return encoded + "," if len(value) == 1 else encoded
    return str(value)


def _decode_scalar(text: str):
    if text == "none":
        return None
    if text == "true":
        return True
    if text == "false":
        return False
    if re.fullmatch(r"-?\d+", text):
        return int(text)
    try:
        return float(text)
    except ValueError:
        return text


def _decode_value(text: str):
    if "," in text:
        return tuple(_decode_scalar(part) for part in text.split(",") if part != "")
    return _decode_scalar(text)


def solution_record(result: OptimizationResult, cfg: ExperimentConfig,
                    timestamp: str | None = None) -> dict:
    """Flat key-value view of an optimization outcome (schema risjam-solution/1).

    With [scenario] report_ris_power enabled the record carries a
    reporting-only RIS output power estimate; it never enters the energy
    efficiency itself.
    """
    report = result.best_report
    best = result.best_solution
    record = {
        "format": "risjam-solution/1",
        "created_utc": timestamp or datetime.now(timezone.utc).isoformat(),
        "config_hash": cfg.config_hash,
        "seed": cfg.seed,
        "version": __version__,
        "feasible": result.feasible,
        "generations_run": result.generations_run,
        "objective": result.best_objective,
        "energy_efficiency_bits_per_j": result.best_eta,
        "user_powers_w": best.user_powers,
        "phases_rad": best.phases,
        "amplitudes": best.amplitudes,
        "blocklength": best.blocklength,
        "retransmissions": best.retransmissions,
        "sjnr": report.sjnr,
        "bler": report.bler,
        "replica_success": report.replica_success,
        "reliability": report.reliability,
        "utilization": report.utilization,
        "mean_delay_s": report.mean_delay,
        "violation_delay": result.constraint_violations["delay"],
        "violation_reliability": result.constraint_violations["reliability"],
        "violation_utilization": result.constraint_violations["utilization"],
        "violation_power_ordering": result.constraint_violations["power_ordering"],
    }
    if cfg.report_ris_power:
        model = build_model(cfg)
        beam = BeamformConfig(np.asarray(best.amplitudes), np.asarray(best.phases))
        record["ris_power_estimate_w"] = model.ris_output_power(
            beam, PowerAllocation(best.user_powers))
    return record


def write_solution_record(record: dict, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{key} = {_encode_value(value)}" for key, value in record.items()]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_solution_record(path: str | Path) -> dict:
    record: dict = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition(" = ")
        record[key] = _decode_value(value)
    return record


def run_optimize(cfg: ExperimentConfig) -> OptimizationResult:
    """Run the GA and persist convergence trace, solution record, config echo."""
    model = build_model(cfg)
    result = run_ga(model, cfg.constraints, cfg.ga)
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    write_convergence_csv(result, cfg, out / "convergence.csv")
    write_solution_record(solution_record(result, cfg), out / "solution.txt")
    (out / "config_echo.txt").write_text(cfg.echo_text())
    return result
