"""
Trajectory Supervisor - Safety Envelope Service

Derives the ground-truth detection interval of a collision scenario:

- latest required detection: the first frame from which maximum braking of
  the ego along its planned path, with the other vehicles holding their
  velocity, still ends in a collision
- earliest allowed detection: the first frame at which a vehicle ahead is
  inside the ego's braking distance (abrupt standstill of that vehicle)

Only vehicles the ego is responsible for are considered: vehicles whose
front is behind the ego's rear axle are responsible themselves.
"""

import logging
import math

import numpy as np
import shapely

from src.config.settings import settings
from src.models.scenario import ExpectationKind, SafetyEnvelope, Scenario, ScenarioFrame
from src.models.trajectory import TrajectoryArrays
from src.services.frenet import project_points
from src.services.geometry import footprint_corners, polygons_from_corners
from src.services.safety_checks import longitudinal_gap

logger = logging.getLogger(__name__)


class EnvelopeNotApplicableError(Exception):
    """
    Raised for scenarios without a dynamic-collision ground truth.
    """

    def __init__(self, message: str) -> None:
        """
        Initialize envelope error.

        Args:
            message: Error message
        """
        self.message = message
        super().__init__(self.message)


class PathSampler:
    """Positions along a planned path by travelled distance, extended straight past its end."""

    def __init__(self, arrays: TrajectoryArrays) -> None:
        xy = np.column_stack((arrays.x, arrays.y))
        seg = np.diff(xy, axis=0)
        length = np.hypot(seg[:, 0], seg[:, 1])
        keep = length > 1e-9
        if keep.any():
            self._start = xy[:-1][keep]
            self._unit = seg[keep] / length[keep, None]
            self._cum = np.concatenate(([0.0], np.cumsum(length[keep])[:-1]))
        else:
            self._start = xy[:1]
            self._unit = np.array([[math.cos(arrays.psi[0]), math.sin(arrays.psi[0])]])
            self._cum = np.zeros(1)

    def sample(self, distance: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return positions (K, 2) and headings (K,) at travelled distances."""
        idx = np.clip(np.searchsorted(self._cum, distance, side="right") - 1, 0, len(self._cum) - 1)
        along = (distance - self._cum[idx])[:, None]
        position = self._start[idx] + along * self._unit[idx]
        heading = np.arctan2(self._unit[idx, 1], self._unit[idx, 0])
        return position, heading


def _responsible_objects(frame: ScenarioFrame, scenario: Scenario) -> tuple[list[int], np.ndarray]:
    """Indices of objects the ego is responsible for and their center gaps (object minus ego)."""
    objects = frame.snapshot.objects
    vehicle = scenario.vehicle
    first = frame.driving.points[0]
    offset = vehicle.rear_axle_offset if scenario.supervisor.pose_reference == "rear_axle" else 0.0
    ego_center = (first.x + offset * math.cos(first.psi), first.y + offset * math.sin(first.psi))
    points = np.array([ego_center] + [(o.x, o.y) for o in objects], dtype=float)
    frenet = project_points(points, scenario.track, scenario.supervisor.corridor_width)
    ds = longitudinal_gap(
        (frenet.s[1:] - frenet.s[0])[:, None], scenario.track, scenario.supervisor.multi_lap_gaps
    )[:, 0]

    responsible = []
    for k, obj in enumerate(objects):
        exempt = -ds[k] - 0.5 * obj.length - vehicle.rear_axle_offset > 0.0
        if not (scenario.rules.rear_responsibility_enabled and exempt):
            responsible.append(k)
    return responsible, ds


def _braking_collision(
    frame: ScenarioFrame, scenario: Scenario, candidates: list[int], dt: float, tail: float
) -> bool:
    """Simulate maximum ego braking along the planned path against constant-velocity objects."""
    vehicle = scenario.vehicle
    arrays = TrajectoryArrays.of(frame.driving)
    v0 = max(float(arrays.v[0]), 0.0)
    t_stop = v0 / vehicle.a_brake_max
    steps = int(math.ceil((t_stop + tail) / dt)) + 1
    tau = np.arange(steps) * dt

    braking_time = np.minimum(tau, t_stop)
    travelled = v0 * braking_time - 0.5 * vehicle.a_brake_max * braking_time**2
    position, heading = PathSampler(arrays).sample(travelled)
    offset = vehicle.rear_axle_offset if scenario.supervisor.pose_reference == "rear_axle" else 0.0
    ego = polygons_from_corners(
        footprint_corners(position[:, 0], position[:, 1], heading, vehicle.length, vehicle.width, offset)
    )

    for k in candidates:
        obj = frame.snapshot.objects[k]
        ox, oy = obj.predict(tau)
        other = polygons_from_corners(footprint_corners(ox, oy, obj.psi, obj.length, obj.width))
        if shapely.intersects(ego, other).any():
            return True
    return False


def ground_truth_envelope(
    scenario: Scenario, dt: float | None = None, tail: float | None = None
) -> SafetyEnvelope:
    """
    Compute the safety envelope of a collision scenario.

    Args:
        scenario: Scenario with other traffic participants
        dt: Simulation step [s] (default ``settings.envelope_dt``)
        tail: Simulated time after the ego stands still [s] (default ``settings.envelope_tail``)

    Returns:
        Envelope; ``t_latest`` is +inf when braking always avoids a collision

    Raises:
        EnvelopeNotApplicableError: For single-check scenarios or scenarios without objects
    """
    if scenario.expected.kind == ExpectationKind.FIRE_SPECIFIC_CHECK:
        raise EnvelopeNotApplicableError(
            f"Scenario {scenario.name} expects check {scenario.expected.check}; "
            "it is graded against its direct oracle"
        )
    if not scenario.has_objects:
        raise EnvelopeNotApplicableError(f"Scenario {scenario.name} has no other vehicles")

    dt = settings.envelope_dt if dt is None else dt
    tail = settings.envelope_tail if tail is None else tail
    vehicle = scenario.vehicle

    t_earliest = math.inf
    t_latest = math.inf
    for frame in scenario.frames:
        if not frame.snapshot.objects or not frame.driving.points:
            continue
        responsible, ds = _responsible_objects(frame, scenario)
        if not responsible:
            continue

        if math.isinf(t_earliest):
            v_ego = max(frame.driving.points[0].v, 0.0)
            braking_distance = v_ego**2 / (2.0 * vehicle.a_brake_max)
            for k in responsible:
                obj = frame.snapshot.objects[k]
                bumper_gap = ds[k] - 0.5 * (vehicle.length + obj.length)
                if ds[k] >= 0.0 and bumper_gap <= braking_distance:
                    t_earliest = frame.t_abs
                    break

        if _braking_collision(frame, scenario, responsible, dt, tail):
            t_latest = frame.t_abs
            break

    t_earliest = min(t_earliest, t_latest)
    envelope = SafetyEnvelope(t_earliest=t_earliest, t_latest=t_latest)
    logger.info(f"Envelope of {scenario.name}: [{t_earliest}, {t_latest}]")
    return envelope
