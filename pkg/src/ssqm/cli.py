"""Command-line front end: ``ssqm run|sweep|crosscheck|validate <config.json>``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import load_config
from .errors import ConfigError, ParameterError
from .runner import EXIT_INTEGRITY, EXIT_OK, EXIT_VALIDATION, crosscheck, run, sweep
from .signal import ORACLE_RANK_CAP


def _parse_values(text: str) -> list:
    values = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            values.append(json.loads(token))
        except json.JSONDecodeError:
            values.append(token)
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ssqm", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one configuration and write its time series")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="override output_path")

    p = sub.add_parser("sweep", help="run a configuration once per parameter value")
    p.add_argument("config")
    p.add_argument("--param", required=True, help="top-level field or parameters.<name>")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("crosscheck", help="compare the matrix path with the dense oracle")
    p.add_argument("config")
    p.add_argument("--max-rank", type=int, default=ORACLE_RANK_CAP)

    p = sub.add_parser("validate", help="check a configuration without running it")
    p.add_argument("config")
    return parser


def main(argv=None, step_hook=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION

    if args.command == "validate":
        print(f"{args.config}: valid {config.scenario} configuration")
        return EXIT_OK

    if args.command == "run":
        result = run(config, step_hook=step_hook, output_path=args.output)
        print(result.message, file=sys.stderr if result.exit_code else sys.stdout)
        return result.exit_code

    if args.command == "sweep":
        try:
            results = sweep(config, args.param, _parse_values(args.values), args.workers)
        except ConfigError as exc:
            for err in exc.errors:
                print(f"error: {err}", file=sys.stderr)
            return EXIT_VALIDATION
        for r in results:
            print(r.message, file=sys.stderr if r.exit_code else sys.stdout)
        return max((r.exit_code for r in results), default=EXIT_OK)

    try:
        report = crosscheck(config, args.max_rank)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_INTEGRITY


if __name__ == "__main__":
    sys.exit(main())
