"""Command line entry point.

Exit codes: 0 success, 1 validation failure, 2 config error, 3 capacity error.
Capacity errors are recorded per row; the exit code is 3 only when they leave
nothing usable (every survival-curve row, or every row a fit needs).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..errors import CapacityError, ValidationError
from . import tasks
from .config import ConfigError, load_config
from .runner import output_paths, survival_curve, write_summary
from .validation import validate

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_CAPACITY = 0, 1, 2, 3

COMMANDS = ("survival-curve", "fit-critical", "fit-subcritical", "spine-stats", "validate", "env-inspect")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="brw-obstacles", description="Branching random walks among Bernoulli obstacles")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, required=name != "validate", help="YAML experiment config")
        p.add_argument("--out", type=Path, default=Path("results"), help="output directory")
        p.add_argument("--workers", type=int, default=None, help="worker threads (results do not depend on it)")
        p.add_argument("--seed", type=int, default=None, help="master seed, overrides the config")
        p.add_argument("--method", type=lambda s: [m.strip() for m in s.split(",") if m.strip()], default=None,
                       help="comma-separated methods: EXACT_DP,DIRECT_MC,SPINE_IS")
    return parser


def _emit(summary: dict, path: Path) -> None:
    write_summary(summary, path)
    print(json.dumps(summary, indent=2, sort_keys=True, default=str))


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = None
        if args.config is not None:
            cfg = load_config(args.config, seed=args.seed, methods=args.method)
            cfg.kind = args.command
            if args.workers is not None:
                cfg.workers = max(1, args.workers)
        workers = args.workers or (cfg.workers if cfg else 1)

        if args.command == "validate":
            report = validate(cfg, workers=workers)
            for line in report.lines():
                print(line)
            return EXIT_OK if report.passed else EXIT_VALIDATION

        if args.command == "survival-curve":
            rows, resumed = survival_curve(cfg, args.out)
            csv_path, _ = output_paths(cfg, args.out)
            print(f"{'resumed' if resumed else 'wrote'} {len(rows)} rows -> {csv_path}")
            failed = sum(r.status == "capacity_error" for r in rows)
            if failed:
                print(f"{failed} row(s) exceeded the memory budget", file=sys.stderr)
                if failed == len(rows):
                    return EXIT_CAPACITY
            return EXIT_OK

        runners = {
            "fit-critical": lambda: tasks.fit_critical(cfg, args.out),
            "fit-subcritical": lambda: tasks.fit_subcritical(cfg, args.out),
            "spine-stats": lambda: tasks.spine_stats(cfg),
            "env-inspect": lambda: tasks.env_inspect(cfg),
        }
        summary = runners[args.command]()
        _emit(summary, output_paths(cfg, args.out)[1])
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ValidationError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
