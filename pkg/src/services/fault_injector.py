"""
Trajectory Supervisor - Fault Injection Service

Derives faulty scenarios from an all-safe base scenario. Every fault
targets one check, and the derived scenario expects exactly that check to
fire. Identity parameters return the base scenario unchanged.
"""

import logging
import math

import numpy as np

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
    Scenario,
    ScenarioFrame,
)
from src.models.track import TrackMap
from src.models.trajectory import Trajectory, TrajectoryArrays, TrajectoryPoint
from src.models.vehicle import Pose
from src.services.frenet import OutOfCorridorError, project_points

logger = logging.getLogger(__name__)

FAULT_TYPES: dict[str, type] = {
    "friction-exceed": FrictionExceed,
    "bound-collision": BoundCollision,
    "rule-violation": RuleViolation,
    "pose-offset": PoseOffset,
    "accel-spike": AccelSpike,
    "emergency-no-stop": EmergencyNoStop,
}


class FaultInjectionError(Exception):
    """
    Raised when a fault cannot be built or applied.
    """

    def __init__(self, message: str) -> None:
        """
        Initialize fault injection error.

        Args:
            message: Error message
        """
        self.message = message
        super().__init__(self.message)


def build_fault(kind: str, **params: float) -> Fault:
    """
    Build a fault model from its kind name and parameters.

    Raises:
        FaultInjectionError: For unknown kinds or invalid parameters
    """
    fault_type = FAULT_TYPES.get(kind)
    if fault_type is None:
        raise FaultInjectionError(f"Unknown fault '{kind}'; expected one of {', '.join(FAULT_TYPES)}")
    try:
        return fault_type(**params)
    except Exception as e:
        raise FaultInjectionError(f"Invalid parameters for fault '{kind}': {e}") from e


def _map_points(trajectory: Trajectory, **updates: list[float]) -> Trajectory:
    points = tuple(
        TrajectoryPoint(**{**p.model_dump(), **{k: v[i] for k, v in updates.items()}})
        for i, p in enumerate(trajectory.points)
    )
    return trajectory.model_copy(update={"points": points})


def _shift_laterally(trajectory: Trajectory, offset: float, track: TrackMap, corridor: float) -> Trajectory:
    arrays = TrajectoryArrays.of(trajectory)
    if len(arrays) == 0:
        return trajectory
    frenet = project_points(np.column_stack((arrays.x, arrays.y)), track, corridor)
    x = arrays.x - offset * np.sin(frenet.heading)
    y = arrays.y + offset * np.cos(frenet.heading)
    return _map_points(trajectory, x=x.tolist(), y=y.tolist())


def _offset_pose(pose: Pose, distance: float, heading: float) -> Pose:
    """Move a pose sideways, left of the given heading positive."""
    return pose.model_copy(
        update={"x": pose.x - distance * math.sin(heading), "y": pose.y + distance * math.cos(heading)}
    )


def _apply(fault: Fault, frame: ScenarioFrame, scenario: Scenario) -> ScenarioFrame:
    driving, emergency, snapshot = frame.driving, frame.emergency, frame.snapshot

    if isinstance(fault, FrictionExceed):
        driving, emergency = (
            _map_points(t, v=[p.v * fault.scale for p in t.points]) for t in (driving, emergency)
        )
    elif isinstance(fault, RuleViolation):
        driving = _map_points(driving, v=[p.v + fault.v_add for p in driving.points])
    elif isinstance(fault, BoundCollision):
        corridor = scenario.supervisor.corridor_width
        driving, emergency = (
            _shift_laterally(t, fault.offset, scenario.track, corridor) for t in (driving, emergency)
        )
        pose = snapshot.ego_pose
        heading = float(project_points(np.array([pose.x, pose.y]), scenario.track, corridor).heading[0])
        snapshot = snapshot.model_copy(update={"ego_pose": _offset_pose(pose, fault.offset, heading)})
    elif isinstance(fault, AccelSpike):
        driving = _map_points(driving, ax=[p.ax + fault.ax_add for p in driving.points])
    elif isinstance(fault, EmergencyNoStop):
        v = [p.v for p in emergency.points]
        if v:
            v[-1] = fault.v_final
        emergency = _map_points(emergency, v=v)
    elif isinstance(fault, PoseOffset):
        pose = snapshot.ego_pose
        snapshot = snapshot.model_copy(update={"ego_pose": _offset_pose(pose, fault.distance, pose.psi)})
    else:
        raise FaultInjectionError(f"Unsupported fault {fault!r}")

    return frame.model_copy(update={"snapshot": snapshot, "driving": driving, "emergency": emergency})


def inject_fault(scenario: Scenario, fault: Fault) -> Scenario:
    """
    Derive a faulty scenario.

    Args:
        scenario: All-safe base scenario (expected ``no-fire``)
        fault: Fault model

    Returns:
        Scenario whose frames carry the fault and whose expectation names
        the targeted check; the base scenario for identity parameters

    Raises:
        FaultInjectionError: If the base is not a no-fire scenario or the
            fault moves trajectories outside the corridor
    """
    if scenario.expected.kind != ExpectationKind.NO_FIRE:
        raise FaultInjectionError(f"Fault injection needs a no-fire base scenario, {scenario.name} expects {scenario.expected}")
    if fault.is_identity:
        logger.info(f"Fault {fault.kind} with identity parameters leaves {scenario.name} unchanged")
        return scenario

    try:
        frames = tuple(_apply(fault, frame, scenario) for frame in scenario.frames)
    except OutOfCorridorError as e:
        raise FaultInjectionError(f"Cannot apply {fault.kind}: {e.message}") from e

    logger.info(f"Injected {fault.kind} into {scenario.name}; expecting {fault.target_check} to fire")
    return scenario.model_copy(
        update={
            "name": f"{scenario.name}-{fault.kind}",
            "frames": frames,
            "expected": Expectation.fire(fault.target_check),
            "envelope": None,
        }
    )
