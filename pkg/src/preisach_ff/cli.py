"""Command line: ``preisach-ff {sweep,compensate,frf,hysteron} --config F --out D``.

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import RUNNERS, ConfigError, ExperimentConfig, run
from .preisach import NumericalError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="preisach-ff", description=__doc__.splitlines()[0])
    parser.add_argument("experiment", choices=sorted(RUNNERS))
    parser.add_argument("--config", help="INI config file (defaults used when omitted)")
    parser.add_argument("--out", help="output directory (overrides [output] dir)")
    parser.add_argument("--override", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override one config value; repeatable")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
        cfg.apply_overrides(args.override)
        if args.out:
            cfg.output.dir = args.out
        record = run(args.experiment, cfg, cfg.output.dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for key in sorted(record.metrics):
        print(f"{key} = {record.metrics[key]}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
