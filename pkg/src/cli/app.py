"""
Trajectory Supervisor - command-line application.

Builds the argument parser from the command modules, configures logging
and maps outcomes to exit codes (0 pass, 1 graded fail, 2 operational error).
"""

import argparse
import logging

from src.cli.commands import COMMANDS
from src.cli.errors import OPERATIONAL_ERRORS, report_operational_error
from src.config.logging import setup_logging
from src.config.settings import settings

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="supervisor",
        description="Verify planned trajectories and replay validation scenarios.",
    )
    parser.add_argument("--log-level", default=None, help=f"Log level (default: {settings.log_level})")
    parser.add_argument("--quiet", action="store_true", help="Only log warnings and print nothing on success")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    """
    Run the CLI.

    Args:
        argv: Arguments without the program name (defaults to ``sys.argv``)

    Returns:
        Exit code
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    level = "WARNING" if args.quiet and args.log_level is None else args.log_level
    setup_logging(level)

    try:
        return args.handler(args)
    except OPERATIONAL_ERRORS as e:
        return report_operational_error(e)
