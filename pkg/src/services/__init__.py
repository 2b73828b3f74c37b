"""
Trajectory Supervisor - Services Layer

Verification core (geometry, Frenet projection, safety checks, supervisor)
and the scenario harness (I/O, replay, grading, fault injection, batch).
"""

from src.services.batch_processor import BatchProcessor, BatchProcessorError, process_batch
from src.services.envelope import EnvelopeNotApplicableError, ground_truth_envelope
from src.services.fault_injector import FaultInjectionError, build_fault, inject_fault
from src.services.frenet import FrenetProjector, OutOfCorridorError, project_to_frenet
from src.services.grading import grade, grade_scenario
from src.services.replay import ReplayResult, replay, write_scores_csv
from src.services.rss import rss_lat_min_gap, rss_lon_min_gap
from src.services.runner import run_scenario
from src.services.safety_checks import (
    check_dynamic_limits,
    check_dynamic_objects,
    check_friction,
    check_pose_match,
    check_rules,
    check_static_collision,
)
from src.services.scenario_io import (
    ScenarioParseError,
    ScenarioValidationError,
    load_scenario,
    write_scenario,
)
from src.services.supervisor import InvalidInputError, Supervisor, evaluate_step, reset
from src.services.track_io import TrackFormatError, read_track_csv, write_track_csv
from src.services.trajectory_validator import TrajectoryValidator, validate_trajectory

__all__ = [
    "BatchProcessor",
    "BatchProcessorError",
    "process_batch",
    "EnvelopeNotApplicableError",
    "ground_truth_envelope",
    "FaultInjectionError",
    "build_fault",
    "inject_fault",
    "FrenetProjector",
    "OutOfCorridorError",
    "project_to_frenet",
    "grade",
    "grade_scenario",
    "ReplayResult",
    "replay",
    "write_scores_csv",
    "rss_lat_min_gap",
    "rss_lon_min_gap",
    "run_scenario",
    "check_dynamic_limits",
    "check_dynamic_objects",
    "check_friction",
    "check_pose_match",
    "check_rules",
    "check_static_collision",
    "ScenarioParseError",
    "ScenarioValidationError",
    "load_scenario",
    "write_scenario",
    "InvalidInputError",
    "Supervisor",
    "evaluate_step",
    "reset",
    "TrackFormatError",
    "read_track_csv",
    "write_track_csv",
    "TrajectoryValidator",
    "validate_trajectory",
]
