"""Command-line front end: sweeps, figure presets, backend checks, fit tables."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__, harness
from .errors import CatBypassError


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out-dir", default="results",
                        help="directory for CSV/JSON outputs (default: results)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker pool size for sweep rows (default: 1)")
    parser.add_argument("--backend", default=None,
                        choices=("dyad", "fock", "both"),
                        help="override the config's backend selector")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catbypass",
        description="Decoherence-protection simulator for coherent-state "
                    "superpositions: sweeps, backend cross-checks, decay fits.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a sweep from a YAML config")
    p_sweep.add_argument("config", help="path to a sweep config document")
    _add_common(p_sweep)

    p_fig = sub.add_parser("figure", help="run a checked-in per-figure config")
    p_fig.add_argument("id", choices=harness.EXPERIMENTS)
    p_fig.add_argument("--configs-dir", default="configs",
                       help="directory with the per-figure configs "
                            "(default: ./configs; falls back to built-ins)")
    _add_common(p_fig)

    p_oracle = sub.add_parser("oracle-check",
                              help="dyad vs Fock backend equivalence report")
    p_oracle.add_argument("--alpha-max", type=float, default=2.5)
    _add_common(p_oracle)

    p_fit = sub.add_parser("fit", help="decay-law fits from a sweep CSV")
    p_fit.add_argument("csv", help="CSV produced by `sweep` or `figure`")
    _add_common(p_fit)
    return parser


def _run_config(config: harness.SweepConfig, args) -> int:
    if args.backend:
        from dataclasses import replace
        config = replace(config, backend=args.backend)
    result = harness.run_sweep(config, threads=args.threads)
    csv_path, json_path = result.write(args.out_dir)
    n_ok = sum(1 for r in result.rows if r["status"] == "ok")
    print(f"{config.experiment}: {n_ok}/{len(result.rows)} rows ok")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    return 0 if result.all_ok else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            return _run_config(harness.SweepConfig.from_yaml(args.config), args)
        if args.command == "figure":
            path = os.path.join(args.configs_dir, f"{args.id}.yaml")
            if os.path.exists(path):
                config = harness.SweepConfig.from_yaml(path)
            else:
                config = harness.default_config(args.id)
            return _run_config(config, args)
        if args.command == "oracle-check":
            report = harness.oracle_check(alpha_max=args.alpha_max)
            os.makedirs(args.out_dir, exist_ok=True)
            path = os.path.join(args.out_dir, "oracle_check.json")
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(report, fh, indent=2)
                fh.write("\n")
            for row in report["rows"]:
                print(f"{row['case']:22s} dyad={row['fidelity_dyad']:.12f} "
                      f"fock={row['fidelity_fock']:.12f} "
                      f"diff={row['discrepancy']:.3e}")
            print(f"max discrepancy {report['max_discrepancy']:.3e} "
                  f"({'pass' if report['passed'] else 'FAIL'}), "
                  f"{report['runtime_s']:.1f}s")
            return 0 if report["passed"] else 1
        if args.command == "fit":
            table = harness.fit_report(args.csv)
            header = f"{'quantity':20s} {'protocol':10s} {'alpha':>6s} " \
                     f"{'fitted':>14s} {'reference':>14s} {'rel_dev':>9s}"
            print(header)
            for row in table:
                ref = "" if row["reference"] is None else f"{row['reference']:14.6g}"
                dev = "" if row["rel_dev"] is None else f"{row['rel_dev']:9.3f}"
                print(f"{row['quantity']:20s} {row['protocol']:10s} "
                      f"{row['alpha']:6g} {row['fitted']:14.6g} {ref:>14s} {dev:>9s}")
            return 0
    except CatBypassError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
