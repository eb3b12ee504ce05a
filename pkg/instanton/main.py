import argparse
import logging
import os
import sys
import time
from typing import List, Optional

from instanton.config import settings
from instanton.core.exceptions import (
    FileFormatError, InstantonError, NotFound, ParameterError, PrimeMismatch
)
from instanton.cli import analysis, history, sampling, transforms
from instanton.cli.common import EXIT_FAIL, EXIT_USAGE, CommandResult

# Setup logging
logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[logging.StreamHandler(sys.stderr)]
    + ([logging.FileHandler(settings.LOG_FILE)] if os.path.isdir(os.path.dirname(settings.LOG_FILE)) else [])
)
logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="instanton",
        description="Construct, verify and analyze symplectic instanton hyperwebs over a prime field",
    )
    parser.add_argument("--record", action="store_true", help="store this run in the run ledger")
    subparsers = parser.add_subparsers(dest="command", required=True)
    sampling.register(subparsers)
    analysis.register(subparsers)
    transforms.register(subparsers)
    history.register(subparsers)
    return parser


def _record(args: argparse.Namespace, result: CommandResult, elapsed_ms: int):
    from instanton.core.database import init_db
    from instanton.services.ledger import record_run

    parameters = {k: v for k, v in vars(args).items() if k not in ("handler", "record", "unrecorded")}
    try:
        init_db()
        record_run(
            command=args.command,
            parameters=parameters,
            seed=getattr(args, "seed", None),
            verdict=result.report.verdict.value if result.report else "none",
            exit_code=result.exit_code,
            report=result.report.model_dump_json() if result.report else None,
            execution_time_ms=elapsed_ms,
        )
    except Exception as e:
        logger.error(f"Failed to record run: {e}")


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    request_start = time.time()
    logger.info(f"Command {args.command} started")
    try:
        result = args.handler(args)
    except (ParameterError, FileFormatError, PrimeMismatch) as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NotFound as e:
        logger.error(f"{args.command}: {e} (attempts={e.attempts}, rejections={e.rejections})")
        print(f"not found: {e}; attempts={e.attempts}; rejections={e.rejections}", file=sys.stderr)
        return EXIT_FAIL
    except InstantonError as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL
    except Exception as e:
        logger.error(f"Unhandled exception in {args.command}: {e}", exc_info=True)
        return EXIT_FAIL

    elapsed_ms = int((time.time() - request_start) * 1000)
    if result.text:
        sys.stdout.write(result.text)
    if (args.record or settings.RECORD_RUNS) and not getattr(args, "unrecorded", False):
        _record(args, result, elapsed_ms)
    logger.info(f"Command {args.command} finished with exit status {result.exit_code} ({elapsed_ms} ms)")
    return result.exit_code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
