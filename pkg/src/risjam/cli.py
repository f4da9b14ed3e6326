"""
Command-line interface.

Subcommands: optimize, sweep {delay-ee, rel-beta, sjnr-n}, mdl-oracle.
Exit codes: 0 success, 1 config error, 2 infeasible/unstable result,
3 internal error.
"""

import argparse
import sys
from pathlib import Path

from ._version import __version__
from .config import ConfigError, load_config
from .sweeps import (UNSTABLE_MARKER, run_optimize, sweep_delay_ee,
                     sweep_reliability_vs_beta, sweep_sjnr_vs_n,
                     write_sweep_csv)
from .traffic import FrameParams, mean_delay, simulate_md1, TrafficParams


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None,
                        help="config file (INI sections; empty means defaults)")
    common.add_argument("--seed", type=int, default=None,
                        help="override the RNG seed")
    common.add_argument("--out", type=Path, default=Path("results"),
                        help="output directory")
    common.add_argument("--preset", choices=("paper", "desk"), default=None,
                        help="scale preset applied below the config file")

    parser = argparse.ArgumentParser(
        prog="risjam",
        description="Active-RIS uplink NOMA simulator and energy-efficiency "
                    "optimizer under jamming")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("optimize", parents=[common],
                   help="run the GA and persist convergence trace + solution")
    sweep = sub.add_parser("sweep", parents=[common], help="run a metric sweep")
    sweep.add_argument("kind", choices=("delay-ee", "rel-beta", "sjnr-n"))
    oracle = sub.add_parser("mdl-oracle", parents=[common],
                            help="check the closed-form M/D/1 delay against a "
                                 "discrete-event simulation")
    oracle.add_argument("--arrivals", type=int, default=1_000_000)
    oracle.add_argument("--rho", default="0.1,0.3,0.5,0.8",
                        help="comma-separated utilization targets")
    return parser


def _cmd_optimize(cfg) -> int:
    result = run_optimize(cfg)
    eta = result.best_eta
    print(f"feasible: {result.feasible}")
    print(f"energy efficiency: {'n/a' if eta is None else f'{eta:.6g} bits/J'}")
    print(f"generations: {result.generations_run}")
    print(f"outputs in {cfg.output_dir}")
    return 0 if result.feasible else 2


def _cmd_sweep(cfg, kind: str) -> int:
    runner = {
        "delay-ee": sweep_delay_ee,
        "rel-beta": sweep_reliability_vs_beta,
        "sjnr-n": sweep_sjnr_vs_n,
    }[kind]
    result = runner(cfg)
    path = write_sweep_csv(result, cfg.output_dir / f"{kind}.csv")
    print(f"{len(result.rows)} rows -> {path}")
    if kind == "delay-ee":
        delay_column = result.columns.index("mean_delay_s")
        if all(row[delay_column] == UNSTABLE_MARKER for row in result.rows):
            print("every grid point is unstable", file=sys.stderr)
            return 2
    return 0


def _cmd_mdl_oracle(cfg, arrivals: int, rho_spec: str) -> int:
    frame = FrameParams(cfg.header_time, cfg.bandwidth, cfg.blocklength)
    service = cfg.traffic.retransmissions * frame.duration
    worst = 0.0
    print(f"service time {service:.6g} s ({cfg.traffic.retransmissions} replicas)")
    for i, target in enumerate(part.strip() for part in rho_spec.split(",")):
        rho = float(target)
        if not 0 < rho < 1:
            print(f"skipping rho={rho} (need 0 < rho < 1)", file=sys.stderr)
            continue
        rate = rho / service
        analytic = mean_delay(frame, TrafficParams((rate,), cfg.traffic.retransmissions), 1)
        simulated = simulate_md1(rate, service, arrivals, seed=cfg.seed + i)
        err = abs(simulated - analytic) / analytic
        worst = max(worst, err)
        print(f"rho={rho:4.2f}  analytic={analytic:.6e}  simulated={simulated:.6e}  "
              f"rel_err={err:.4%}")
    if worst > 0.02:
        print("discrete-event check failed (relative error above 2%)",
              file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, preset=args.preset, seed=args.seed,
                          output_dir=args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command == "optimize":
            return _cmd_optimize(cfg)
        if args.command == "sweep":
            return _cmd_sweep(cfg, args.kind)
        if args.command == "mdl-oracle":
            return _cmd_mdl_oracle(cfg, args.arrivals, args.rho)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
