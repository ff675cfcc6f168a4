"""Command-line front end: one subcommand per experiment family.

Exit codes: 0 all verdicts pass, 1 any verdict fails, 2 config or usage
error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import harness
from .harness import ConfigError

_SUBCOMMANDS = list(harness.EXPERIMENTS) + ["all"]

THREADS_ENV = "RBMIBP_THREADS"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rbmibp",
        description=("Numerical verification toolkit for renormalized "
                     "squared-derivative functionals of Brownian paths: "
                     "Monte-Carlo experiments checked against closed "
                     "forms."),
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    for name in _SUBCOMMANDS:
        p = sub.add_parser(name, help=f"run the {name} experiment"
                           if name != "all" else "run every experiment")
        p.add_argument("--config", help="TOML config file")
        p.add_argument("--override", action="append", default=[],
                       metavar="KEY=VALUE",
                       help="override a config key (repeatable)")
        p.add_argument("--out", default="out",
                       help="output directory (default: out)")
        p.add_argument("--seed", type=int, help="RNG seed override")
        p.add_argument("--threads", type=int,
                       help=f"thread count (default: ${THREADS_ENV} or 1)")
        p.add_argument("--quiet", action="store_true",
                       help="suppress per-check output")
    return parser


def _apply_threads(args) -> None:
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1") or "1")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS"):
        os.environ.setdefault(var, str(threads))


def _load_config(args) -> harness.ExperimentConfig:
    overrides = list(args.override)
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.config:
        return harness.config_from_toml(args.config, overrides)
    return harness.config_with_overrides({}, overrides)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2

    try:
        _apply_threads(args)
        cfg = _load_config(args)
        names = (list(harness.EXPERIMENTS) if args.command == "all"
                 else [args.command])
        reports = []
        for name in names:
            cfg.experiment_id = name
            reports.append(harness.EXPERIMENTS[name](cfg))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    os.makedirs(args.out, exist_ok=True)
    harness.write_report_json(reports,
                              os.path.join(args.out, "report.json"))
    harness.write_tables_csv(reports, os.path.join(args.out, "tables"))

    if not args.quiet:
        for report in reports:
            for line in report.summary_lines():
                print(line)
    all_passed = all(r.passed for r in reports)
    print(f"{'PASS' if all_passed else 'FAIL'}: "
          f"{sum(r.passed for r in reports)}/{len(reports)} experiments "
          f"passed (report: {os.path.join(args.out, 'report.json')})")
    return 0 if all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
