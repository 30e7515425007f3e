"""Command line entry point.

Exit codes: 0 success, 1 a study expectation was violated, 2 bad
configuration or output path, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .errors import BracketError, ConfigError, ConvergenceError, EmptyVenueError, InfeasibleTargetError
from .experiments import STUDIES, load_config
from .output import FORMATS, emit_results

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

HELP = {
    "equilibrate": "run best-response dynamics on the configured game",
    "binary-root": "solve a two-type game from its characteristic function",
    "spotlight": "equilibrium with one spotlighted venue",
    "convergence": "rounds to convergence from random starts",
    "uniqueness": "pairwise distance between equilibria from random starts",
    "cost-sweep": "equilibrium impacts across cost growth rates",
    "spotlight-threshold": "spotlight each venue in turn and compare to baseline",
    "spotlight-ratio-sweep": "spotlight each venue at several spotlight ratios",
}


def _add_common(parser: argparse.ArgumentParser, suppress: bool = False):
    # subcommands repeat the global flags without defaults so a flag given
    # before the subcommand is not overwritten
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--config", default=default(None), help="JSON config with game, experiment and spotlight sections")
    parser.add_argument("--seed", type=int, default=default(None), help="seed for random starts (overrides the config)")
    parser.add_argument("--eps", type=float, default=default(None), help="stopping tolerance on the impact gap")
    parser.add_argument("--max-rounds", type=int, default=default(None), help="round limit for best-response dynamics")
    parser.add_argument("--out", default=default("out"), help="output directory (default: out)")
    parser.add_argument("--format", choices=FORMATS, default=default("csv"), help="output format (default: csv)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pubchoice", description=__doc__.splitlines()[0])
    _add_common(parser)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in STUDIES:
        _add_common(sub.add_parser(name, help=HELP[name]), suppress=True)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if not 0 <= args.seed < 2 ** 64:
                raise ConfigError("--seed must fit in an unsigned 64-bit integer")
            cfg.seed = args.seed
        if args.eps is not None:
            if not args.eps > 0:
                raise ConfigError("--eps must be positive")
            cfg.eps = args.eps
        if args.max_rounds is not None:
            if args.max_rounds < 1:
                raise ConfigError("--max-rounds must be at least 1")
            cfg.max_rounds = args.max_rounds
        result = STUDIES[args.command](cfg)
        paths = emit_results(result, args.format, args.out, cfg.echo(), cfg.seed)
    except (ConfigError, InfeasibleTargetError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, BracketError, EmptyVenueError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    for path in paths:
        print(path)
    for note in result.notes:
        print(f"note: {note}")
    for v in result.violations:
        print(f"VIOLATION [{v['check']}] {v['detail']}", file=sys.stderr)
    return EXIT_VIOLATION if result.violations else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
