"""
``corpus`` command: export the built-in scenario library.
"""

import argparse

from src.cli.errors import EXIT_PASS
from src.services.scenario_library import export_corpus


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("corpus", help="Write the built-in scenario corpus to a directory")
    parser.add_argument("directory", help="Destination directory")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    paths = export_corpus(args.directory)
    if not args.quiet:
        print(f"wrote {len(paths)} scenarios to {args.directory}")
    return EXIT_PASS
