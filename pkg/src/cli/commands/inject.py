"""
``inject`` command: derive a fault-injected scenario file.
"""

import argparse

from src.cli.errors import EXIT_PASS
from src.services.fault_injector import FAULT_TYPES, build_fault, inject_fault
from src.services.scenario_io import load_scenario, write_scenario

PARAMETER_NAMES = ("scale", "offset", "v_add", "distance", "ax_add", "v_final")


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("inject", help="Write a fault-injected copy of a scenario")
    parser.add_argument("scenario", help="All-safe base scenario file")
    parser.add_argument("--fault", required=True, choices=sorted(FAULT_TYPES), help="Fault kind")
    parser.add_argument("--scale", type=float, help="friction-exceed: velocity scale")
    parser.add_argument("--offset", type=float, help="bound-collision: lateral shift [m]")
    parser.add_argument("--v-add", type=float, help="rule-violation: added velocity [m/s]")
    parser.add_argument("--distance", type=float, help="pose-offset: pose displacement [m]")
    parser.add_argument("--ax-add", type=float, help="accel-spike: added acceleration [m/s^2]")
    parser.add_argument("--v-final", type=float, help="emergency-no-stop: final velocity [m/s]")
    parser.add_argument("--out", required=True, help="Destination scenario file")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    params = {
        name: getattr(args, name) for name in PARAMETER_NAMES if getattr(args, name) is not None
    }
    fault = build_fault(args.fault, **params)
    scenario = load_scenario(args.scenario)
    path = write_scenario(inject_fault(scenario, fault), args.out)
    if not args.quiet:
        print(f"wrote {path}")
    return EXIT_PASS
