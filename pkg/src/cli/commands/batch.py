"""
``batch`` command: replay and grade every scenario of a directory.
"""

import argparse

from src.cli.commands.run import add_override_flag, parse_overrides
from src.cli.errors import exit_code
from src.config.settings import settings
from src.services.batch_processor import process_batch
from src.services.report_writer import format_summary_text


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("batch", help="Replay and grade a directory of scenarios")
    parser.add_argument("directory", help="Directory of scenario files")
    parser.add_argument("--out", default="results", help="Output directory (default: results)")
    parser.add_argument(
        "--parallelism",
        type=int,
        default=settings.batch_parallelism,
        help="Number of worker processes",
    )
    add_override_flag(parser)
    parser.add_argument("--svg", action="store_true", help="Also write score timelines as SVG")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    summary = process_batch(
        args.directory,
        args.out,
        parallelism=args.parallelism,
        overrides=parse_overrides(args.overrides),
        svg=args.svg,
    )
    if not args.quiet:
        print(format_summary_text(summary), end="")
    return exit_code(summary.all_passed)
