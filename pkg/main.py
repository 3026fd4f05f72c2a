"""
ptzwatch - Main Entry Point
Commands: run, compare, bench
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

from config import config
from cli.handlers import CommandHandlers
from controllers import CONTROLLER_NAMES
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def setup_logging(level: str = config.LOG_LEVEL):
    logging.basicConfig(
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        level=getattr(logging, level, logging.INFO),
    )


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--scenario", required=True, help="scenario file, or the name of a bundled one")
    parser.add_argument("--steps", type=int, help="horizon tau (overrides the file)")
    parser.add_argument("--out", help=f"output directory (default: PTZ_OUTPUT_DIR or {config.OUTPUT_DIR})")
    parser.add_argument("--reproducible", action="store_true", help="omit wall-clock fields from outputs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=config.APP_NAME, description="Active PTZ camera surveillance engine")
    parser.add_argument("--version", action="version", version=f"{config.APP_NAME} {config.APP_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one controller")
    _add_common(run)
    run.add_argument("--controller", help=f"one of {', '.join(CONTROLLER_NAMES)} (overrides the file)")
    run.add_argument("--targets", type=int, help="number of targets m (overrides the file)")
    run.add_argument("--seed", type=int, help="run seed (overrides the file)")
    run.add_argument("--seeds", help="seed list such as 1..20 or 1,4,9")
    run.add_argument("--emit-beliefs", action="store_true", help="write per-step belief snapshots (JSONL)")
    run.add_argument("--verbose-values", action="store_true", help="write the per-step action-value table")
    run.add_argument("--render", action="store_true", help="save a PNG of the final step")
    run.add_argument("--jobs", type=int, help=f"parallel runs (default: PTZ_JOBS={config.JOBS})")

    compare = sub.add_parser("compare", help="all controllers on seed-matched trajectories")
    _add_common(compare)
    compare.add_argument("--targets", help="target counts such as 5,10,20")
    compare.add_argument("--seed", type=int, help="single seed (overrides the file)")
    compare.add_argument("--seeds", help="seed list such as 1..20 or 1,4,9")
    compare.add_argument("--keep-runs", action="store_true", help="also write every per-run table")
    compare.add_argument("--jobs", type=int, help=f"parallel runs (default: PTZ_JOBS={config.JOBS})")

    bench = sub.add_parser("bench", help="plan() runtime against the number of targets")
    _add_common(bench)
    bench.add_argument("--m-values", help=f"target counts (default: {','.join(map(str, config.BENCH_M_VALUES))})")
    bench.add_argument("--repeats", type=int, help=f"timed repeats per point (default: {config.BENCH_REPEATS})")
    bench.add_argument("--stub", action="store_true", help="time the constant-work stub planner")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main function"""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging()

    handlers = CommandHandlers()
    commands = {
        "run": handlers.handle_run,
        "compare": handlers.handle_compare,
        "bench": handlers.handle_bench,
    }

    logger.debug(config.describe())
    try:
        return commands[args.command](args)
    except ConfigurationError as e:
        print(f"❌ Configuration error: {e}", file=sys.stderr)
        logger.debug("Configuration error", exc_info=True)
        return EXIT_CONFIG
    except Exception as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        logger.debug("Unhandled error", exc_info=True)
        return EXIT_RUNTIME


if __name__ == '__main__':
    sys.exit(main())
