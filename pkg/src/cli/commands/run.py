"""
``run`` command: replay and grade one scenario.
"""

import argparse
import logging

from src.cli.errors import exit_code
from src.services.runner import run_scenario
from src.services.scenario_io import ScenarioParseError, load_scenario
from src.utils.helpers import parse_key_value

logger = logging.getLogger(__name__)


def parse_overrides(assignments: list[str] | None) -> dict[str, str]:
    """
    Turn repeated ``--set key=value`` flags into an override mapping.

    Raises:
        ScenarioParseError: If an assignment has no ``=`` or an empty key
    """
    try:
        return dict(parse_key_value(text) for text in assignments or [])
    except ValueError as e:
        raise ScenarioParseError(f"Invalid override: {e}", field="--set") from e


def add_override_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        metavar="KEY=VALUE",
        help="Override a scenario parameter, e.g. rss.rho=0.4 (repeatable)",
    )


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("run", help="Replay and grade one scenario")
    parser.add_argument("scenario", help="Scenario file")
    parser.add_argument("--out", default="results", help="Output directory (default: results)")
    add_override_flag(parser)
    parser.add_argument("--svg", action="store_true", help="Also write the score timeline as SVG")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario, parse_overrides(args.overrides))
    report = run_scenario(scenario, args.out, svg=args.svg)
    if not args.quiet:
        status = "PASS" if report.passed else "FAIL"
        print(f"{status} {report.scenario}: {report.grade.reason}")
    return exit_code(report.passed)
