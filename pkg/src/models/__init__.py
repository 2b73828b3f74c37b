"""
Trajectory Supervisor - Data Models

This package contains all data models of the trajectory supervisor.
"""

from src.models.report import BatchEntry, BatchSummary, GradeResult, LatencyStats, RunReport
from src.models.safety import (
    CHECK_ORDER,
    INPUT_VALID,
    MARGIN_SENTINEL,
    CheckId,
    CheckResult,
    RssParameters,
    RuleSet,
)
from src.models.scenario import (
    AccelSpike,
    BoundCollision,
    EmergencyNoStop,
    Expectation,
    ExpectationKind,
    Fault,
    FrictionExceed,
    PoseOffset,
    RuleViolation,
    SafetyEnvelope,
    Scenario,
    ScenarioFrame,
)
from src.models.track import FrenetPosition, TrackMap
from src.models.trajectory import Trajectory, TrajectoryArrays, TrajectoryKind, TrajectoryPoint
from src.models.vehicle import GRAVITY, ObjectState, Pose, VehicleParameters
from src.models.verdict import (
    Action,
    PerceptionSnapshot,
    SupervisorConfig,
    SupervisorState,
    TrajectoryAssessment,
    Verdict,
)

__all__ = [
    "BatchEntry",
    "BatchSummary",
    "GradeResult",
    "LatencyStats",
    "RunReport",
    "CHECK_ORDER",
    "INPUT_VALID",
    "MARGIN_SENTINEL",
    "CheckId",
    "CheckResult",
    "RssParameters",
    "RuleSet",
    "AccelSpike",
    "BoundCollision",
    "EmergencyNoStop",
    "Expectation",
    "ExpectationKind",
    "Fault",
    "FrictionExceed",
    "PoseOffset",
    "RuleViolation",
    "SafetyEnvelope",
    "Scenario",
    "ScenarioFrame",
    "FrenetPosition",
    "TrackMap",
    "Trajectory",
    "TrajectoryArrays",
    "TrajectoryKind",
    "TrajectoryPoint",
    "GRAVITY",
    "ObjectState",
    "Pose",
    "VehicleParameters",
    "Action",
    "PerceptionSnapshot",
    "SupervisorConfig",
    "SupervisorState",
    "TrajectoryAssessment",
    "Verdict",
]
