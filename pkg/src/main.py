"""Main entry point for levinson-check."""

import argparse
import logging
import sys

from src.config import config
from src.errors import ConfigError, LevinsonError
from src.harness import (
    EXIT_ERROR,
    cmd_exceptional_scan,
    cmd_spectrum,
    cmd_sweep,
    cmd_trace,
    cmd_verify,
)
from src.utils import parse_complex

LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors as ConfigError instead of exiting."""

    def error(self, message: str) -> None:
        raise ConfigError(f"{self.prog}: {message}")


def _complex_arg(text: str) -> complex:
    try:
        return parse_complex(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _add_point_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--m", type=_complex_arg, required=True, help='order m as "re,im"')
    parser.add_argument("--kappa", type=_complex_arg, required=True, help='boundary parameter as "re,im"')
    parser.add_argument("--out", help="write output to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    """Build the command-line parser with its five subcommands."""
    parser = _Parser(prog="levinson-check", description="Levinson's theorem checks for H_{m,kappa}")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    verify = subparsers.add_parser("verify", help="compare winding number and eigenvalue count")
    _add_point_args(verify)
    verify.add_argument("--json", action="store_true", help="print the full record as JSON")
    verify.set_defaults(handler=cmd_verify)

    spectrum = subparsers.add_parser("spectrum", help="list eigenvalues")
    _add_point_args(spectrum)
    spectrum.add_argument("--check", action="store_true", help="confirm each eigenvalue by shooting")
    spectrum.add_argument("--json", action="store_true", help="print the listing as JSON")
    spectrum.set_defaults(handler=cmd_spectrum)

    trace = subparsers.add_parser("trace", help="export the boundary phase as CSV")
    _add_point_args(trace)
    trace.add_argument("--samples", type=int, default=256, help="rows per edge")
    trace.set_defaults(handler=cmd_trace)

    sweep = subparsers.add_parser("sweep", help="verify a parameter grid")
    sweep.add_argument("--config", required=True, help="SweepConfig JSON file")
    sweep.add_argument("--out", help="CSV path (stdout if omitted)")
    sweep.add_argument("--parallel", type=int, default=None, help="worker processes (0 = CPU count)")
    sweep.add_argument("--json", action="store_true", help="print the sweep summary as JSON")
    sweep.set_defaults(handler=cmd_sweep)

    scan = subparsers.add_parser("exceptional-scan", help="export exceptional kappa-curves")
    scan.add_argument("--config", required=True, help="SweepConfig JSON file")
    scan.add_argument("--out", help="CSV path (stdout if omitted)")
    scan.set_defaults(handler=cmd_exceptional_scan)

    return parser


def configure_logging(level_name: str) -> None:
    """Send log records to stderr so that stdout stays machine readable."""
    logging.basicConfig(
        level=LOG_LEVELS.get(level_name, logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],
    )


def main(argv: list[str] | None = None) -> int:
    """Parse arguments and dispatch to a command.

    Returns:
        Process exit code: 0 ok, 2 theorem mismatch, 1 guard, usage or config error.
    """
    problems = config.validate()
    if problems:
        for problem in problems:
            logger.error(f"Invalid configuration: {problem}")
        return EXIT_ERROR

    try:
        args = build_parser().parse_args(argv)
        return args.handler(args)
    except LevinsonError as e:
        logger.error(str(e))
        return EXIT_ERROR


def run() -> None:
    """Entry point for the command line."""
    configure_logging(config.LOG_LEVEL)
    try:
        code = main()
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        code = EXIT_ERROR
    except Exception as e:
        logger.error(f"Fatal error: {e}")
        code = EXIT_ERROR
    sys.exit(code)


if __name__ == "__main__":
    run()
