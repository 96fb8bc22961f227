"""Command-line entry points: run a matrix, run a sweep, aggregate results."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("config", help="TOML experiment file")
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--seed", type=int, default=None, help="override master seed")


def _load(args) -> harness.ExperimentConfig:
    cfg = harness.load_config(args.config)
    if args.out is not None:
        cfg.output_dir = args.out
    if args.seed is not None:
        cfg.master_seed = args.seed
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="captune",
        description="Safe-exploration resource-manager experiments on a "
                    "synthetic execution-space simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute the full experiment matrix")
    _add_common(run_p)

    sweep_p = sub.add_parser("sweep", help="vary one axis, defaults elsewhere")
    sweep_p.add_argument(
        "--kind", required=True,
        choices=["gamma", "interval", "model", "offline-fraction"])
    _add_common(sweep_p)

    rep_p = sub.add_parser("report-data", help="aggregate result rows")
    rep_p.add_argument("--in", dest="inp", required=True, help="results CSV")
    rep_p.add_argument("--group-by", required=True,
                       help="comma-separated key columns")
    rep_p.add_argument("--out", type=Path, default=None,
                       help="output CSV (default: stdout)")
    rep_p.add_argument("--best-interval", action="store_true",
                       help="also print the lowest-violation interval per policy")

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")

    if args.command == "run":
        cfg = _load(args)
        rows = harness.run_matrix(cfg, jobs=args.jobs)
        print(f"{len(rows)} runs -> {cfg.output_dir / 'results.csv'}")
        return 0

    if args.command == "sweep":
        cfg = _load(args)
        rows = harness.sweep(args.kind, cfg, jobs=args.jobs)
        print(f"{len(rows)} runs -> {cfg.output_dir / f'sweep_{args.kind}.csv'}")
        return 0

    if args.command == "report-data":
        rows = harness.read_result_rows(args.inp)
        keys = [k.strip() for k in args.group_by.split(",") if k.strip()]
        aggregates = harness.aggregate_rows(rows, keys)
        if args.out is not None:
            with open(args.out, "w", newline="") as fh:
                harness.write_aggregate_csv(aggregates, keys, fh)
        else:
            harness.write_aggregate_csv(aggregates, keys, sys.stdout)
        if args.best_interval:
            for policy, iv in sorted(harness.best_intervals(rows).items()):
                print(f"best-interval,{policy},{iv}")
        return 0

    return 1


if __name__ == "__main__":
    sys.exit(main())
