"""``jclab`` command-line entry point.

Exit codes: 0 on success, 1 when a validation check fails, 2 for
configuration or I/O errors.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import FORMATS, SCENARIOS, load_config
from .errors import ConfigError, JCLabError
from .scenarios import run_scenario, summarize, thread_count, write_dataset
from .validation import report_dataset, validate

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jclab",
        description="Closed-form atom-field dynamics, metrics and teleportation datasets.",
    )
    parser.add_argument("scenario", choices=SCENARIOS)
    parser.add_argument("--config", help="JSON scenario config (defaults are used when omitted)")
    parser.add_argument("--out", help="output file; defaults to the config's output_path or <scenario>.<format>")
    parser.add_argument("--format", choices=FORMATS, help="dataset format (overrides the config)")
    parser.add_argument("--threads", type=int, help="worker processes (fallback: JCLAB_THREADS, then 1)")
    parser.add_argument("--seed", type=int, help="RNG seed (overrides the config)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, args.scenario)
        changes = {}
        if args.format is not None:
            changes["format"] = args.format
        if args.seed is not None:
            changes["seed"] = args.seed
        if changes:
            config = replace(config, **changes)
        threads = thread_count(args.threads)
        out = args.out or config.output_path

        if config.scenario == "validate":
            results = validate(config, threads)
            for r in results:
                print(r.line())
            if out:
                write_dataset(report_dataset(results), out, config.format)
            failed = sum(not r.passed for r in results)
            print(f"{len(results) - failed}/{len(results)} checks passed")
            return EXIT_VALIDATION if failed else EXIT_OK

        dataset = run_scenario(config, threads)
        path = write_dataset(dataset, out or f"{config.scenario}.{config.format}", config.format)
        for line in summarize(dataset):
            print(line)
        print(f"wrote {path}")
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except JCLabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
