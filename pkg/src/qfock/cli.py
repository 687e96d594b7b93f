"""Command line entry point for the verification sweeps.

Reads an optional JSON config, applies flag overrides, runs the selected
suite, writes the report file, prints a one-line-per-check summary, and exits
nonzero if any check failed.  The output directory can also be set through
the ``QFOCK_OUT_DIR`` environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from .reports import (SUITES, SweepConfig, all_passed, emit, run_suite)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfock",
        description="Run q-deformed Fock space verification sweeps.")
    parser.add_argument("--config", metavar="PATH",
                        help="JSON config file with sweep parameters")
    parser.add_argument("--suite", default="all",
                        choices=list(SUITES) + ["all"],
                        help="which check suite to run (default: all)")
    parser.add_argument("--q", type=float, action="append", dest="q_values",
                        metavar="Q", help="deformation parameter in (-1, 1); "
                        "repeat the flag for a grid (overrides config)")
    parser.add_argument("--dim-spec", action="append", dest="spectra",
                        metavar="SPEC", help="generator spectrum such as "
                        "'t2', 'b2' or 'b2x2+t1'; repeatable (overrides config)")
    parser.add_argument("--degree", type=int, help="Fock truncation degree")
    parser.add_argument("--seed", type=int, help="root seed for sampled checks")
    parser.add_argument("--format", default="json", choices=["json", "csv"],
                        help="report file format (default: json)")
    parser.add_argument("--out", metavar="PATH",
                        help="report file path, or a directory to place "
                        "reports.<fmt> in (default: $QFOCK_OUT_DIR or cwd)")
    parser.add_argument("--timing", action="store_true",
                        help="include wall times in the emitted report "
                        "(breaks byte-for-byte determinism)")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress the per-check summary lines")
    return parser


def resolve_config(args) -> SweepConfig:
    if args.config:
        config = SweepConfig.from_file(args.config)
    else:
        config = SweepConfig()
    overrides = {}
    if args.q_values:
        overrides["q_values"] = tuple(args.q_values)
    if args.spectra:
        overrides["spectra"] = tuple(args.spectra)
    if args.degree is not None:
        overrides["degree"] = args.degree
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        config = SweepConfig(
            q_values=overrides.get("q_values", config.q_values),
            spectra=overrides.get("spectra", config.spectra),
            degree=overrides.get("degree", config.degree),
            seed=overrides.get("seed", config.seed),
            samples=config.samples,
            tolerances=config.tolerances)
    return config


def resolve_out_path(args) -> str:
    out = args.out or os.environ.get("QFOCK_OUT_DIR") or os.getcwd()
    if os.path.isdir(out):
        return os.path.join(out, f"reports.{args.format}")
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    started = time.perf_counter()
    reports = run_suite(config, args.suite)
    elapsed = time.perf_counter() - started
    path = resolve_out_path(args)
    emit(reports, args.format, path, include_timing=args.timing)
    if not args.quiet:
        for r in reports:
            status = "PASS" if r.passed else "FAIL"
            grid = " ".join(f"{k}={v}" for k, v in sorted(r.params.items()))
            print(f"{status} {r.check} [{grid}] residual={r.residual:.3e} "
                  f"bound={r.bound:.3e}")
        n_fail = sum(1 for r in reports if not r.passed)
        print(f"{len(reports) - n_fail}/{len(reports)} checks passed "
              f"in {elapsed:.1f}s; report written to {path}")
    return 0 if all_passed(reports) else 1


if __name__ == "__main__":
    sys.exit(main())
