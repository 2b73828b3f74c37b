"""
``report`` command: aggregate written run reports into a summary.
"""

import argparse

from src.cli.errors import exit_code
from src.services.report_writer import collect_reports, format_summary_text, write_batch_summary


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("report", help="Summarise the run reports of a directory")
    parser.add_argument("directory", help="Directory holding <name>_report.json files")
    parser.add_argument("--out", help="Write summary.txt and summary.json here")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    summary = collect_reports(args.directory)
    if args.out:
        write_batch_summary(summary, args.out)
    if not args.quiet:
        print(format_summary_text(summary), end="")
    return exit_code(summary.all_passed)
