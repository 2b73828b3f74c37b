"""
Trajectory Supervisor - Grading Service

Grades replay verdicts against the scenario expectation:

- no-fire scenarios pass iff no frame is rated unsafe
- collision scenarios pass iff the rating is safe before the envelope,
  unsafe after it and fires at least once
- single-check scenarios pass iff the named check fires exactly in the
  frames where an independent formula oracle reports a violation
"""

import logging
import math

import numpy as np
import shapely

from src.config.settings import settings
from src.models.report import GradeResult
from src.models.safety import CHECK_ORDER, INPUT_VALID, CheckId
from src.models.scenario import ExpectationKind, SafetyEnvelope, Scenario, ScenarioFrame
from src.models.trajectory import Trajectory, TrajectoryArrays, TrajectoryKind
from src.models.vehicle import GRAVITY
from src.models.verdict import Verdict
from src.services.envelope import ground_truth_envelope
from src.services.frenet import project_points
from src.services.geometry import footprint_corners, polygons_from_corners

logger = logging.getLogger(__name__)


def first_fire(verdicts: list[Verdict]) -> float | None:
    """Timestamp of the first unsafe verdict."""
    return next((v.t_abs for v in verdicts if not v.s_tot), None)


def grade_no_fire(verdicts: list[Verdict]) -> GradeResult:
    """PASS iff no frame is rated unsafe."""
    fire_time = first_fire(verdicts)
    if fire_time is not None:
        return GradeResult(passed=False, reason=f"fired at t={fire_time} in a no-fire scenario", fire_time=fire_time)
    return GradeResult(passed=True, reason="ok")


def grade(verdicts: list[Verdict], envelope: SafetyEnvelope) -> GradeResult:
    """
    Grade verdicts against a safety envelope.

    Before ``t_earliest`` every frame must be safe, after ``t_latest`` every
    frame must be unsafe; inside the envelope any rating passes. An
    envelope without collision (``t_latest`` infinite) requires no fire.

    Args:
        verdicts: One verdict per replayed frame, in time order
        envelope: Ground-truth detection interval

    Returns:
        PASS/FAIL with reason (``ok``, ``premature``, ``missed``)
    """
    if not envelope.fires:
        return grade_no_fire(verdicts)

    fire_time = first_fire(verdicts)
    premature = next((v.t_abs for v in verdicts if not v.s_tot and v.t_abs < envelope.t_earliest), None)
    if premature is not None:
        return GradeResult(
            passed=False,
            reason=f"premature: fired at t={premature} before t_earliest={envelope.t_earliest}",
            fire_time=fire_time,
        )
    if fire_time is None:
        return GradeResult(passed=False, reason=f"missed: never fired, t_latest={envelope.t_latest}")
    late = next((v.t_abs for v in verdicts if v.s_tot and v.t_abs > envelope.t_latest), None)
    if late is not None:
        return GradeResult(
            passed=False,
            reason=f"missed: rated safe at t={late} after t_latest={envelope.t_latest}",
            fire_time=fire_time,
        )
    return GradeResult(passed=True, reason="ok", fire_time=fire_time)


def _candidates(frame: ScenarioFrame) -> tuple[Trajectory, Trajectory]:
    return frame.driving, frame.emergency


def _friction_oracle(frame: ScenarioFrame, scenario: Scenario) -> bool:
    mass = scenario.vehicle.mass
    normal = mass * GRAVITY
    for trajectory in _candidates(frame):
        mu_values: list[float]
        if scenario.track.mu is not None:
            arrays = TrajectoryArrays.of(trajectory)
            frenet = project_points(
                np.column_stack((arrays.x, arrays.y)), scenario.track, scenario.supervisor.corridor_width
            )
            mu_values = [float(m) for m in scenario.track.mu_at(frenet.s)]
        elif isinstance(frame.snapshot.mu, tuple):
            if len(frame.snapshot.mu) != len(trajectory):
                return True
            mu_values = list(frame.snapshot.mu)
        else:
            mu_values = [frame.snapshot.mu] * len(trajectory)
        for point, mu in zip(trajectory.points, mu_values):
            a_lat = point.v * point.v * point.kappa
            force = mass * math.sqrt(point.ax * point.ax + a_lat * a_lat)
            if force > mu * normal:
                return True
    return False


def _bounds_oracle(frame: ScenarioFrame, scenario: Scenario) -> bool:
    vehicle = scenario.vehicle
    offset = vehicle.rear_axle_offset if scenario.supervisor.pose_reference == "rear_axle" else 0.0
    for trajectory in _candidates(frame):
        arrays = TrajectoryArrays.of(trajectory)
        polygons = polygons_from_corners(
            footprint_corners(arrays.x, arrays.y, arrays.psi, vehicle.length, vehicle.width, offset)
        )
        if not shapely.contains_properly(scenario.track.corridor, polygons).all():
            return True
    return False


def _rules_oracle(frame: ScenarioFrame, scenario: Scenario) -> bool:
    rules = scenario.rules
    for trajectory in _candidates(frame):
        for point in trajectory.points:
            if rules.v_max is not None and point.v > rules.v_max:
                return True
            if rules.a_lon_max is not None and abs(point.ax) > rules.a_lon_max:
                return True
    return False


def _dynamic_limits_oracle(frame: ScenarioFrame, scenario: Scenario) -> bool:
    vehicle = scenario.vehicle
    for trajectory in _candidates(frame):
        for point in trajectory.points:
            if abs(point.kappa) * vehicle.turn_radius_min > 1.0:
                return True
            if point.ax < -vehicle.a_brake_max or point.ax > float(vehicle.engine_accel(point.v)):
                return True
    return False


def _pose_oracle(frame: ScenarioFrame, scenario: Scenario) -> bool:
    config = scenario.supervisor
    pose = frame.snapshot.ego_pose
    for trajectory in _candidates(frame):
        window = trajectory.points[: config.match_window]
        if not window or min(math.hypot(p.x - pose.x, p.y - pose.y) for p in window) > config.pose_threshold:
            return True
    return False


def _input_oracle(frame: ScenarioFrame, scenario: Scenario) -> bool:
    for trajectory in _candidates(frame):
        points = trajectory.points
        if len(points) < 2:
            return True
        if any(not math.isfinite(v) for p in points for v in (p.t, p.x, p.y, p.psi, p.kappa, p.v, p.ax)):
            return True
        if any(p.v < 0 or p.t < 0 for p in points):
            return True
        if any(not b.t > a.t for a, b in zip(points, points[1:])):
            return True
        if trajectory.kind == TrajectoryKind.EMERGENCY and abs(points[-1].v) > settings.standstill_tolerance:
            return True
    return False


ORACLES = {
    CheckId.A_COMB.value: _friction_oracle,
    CheckId.S_STAT.value: _bounds_oracle,
    CheckId.RULES.value: _rules_oracle,
    CheckId.DYN_LIMITS.value: _dynamic_limits_oracle,
    CheckId.POSE_MATCH.value: _pose_oracle,
    INPUT_VALID: _input_oracle,
}


def _fired(verdict: Verdict, check: str) -> bool:
    if check == INPUT_VALID:
        return verdict.has_input_violations
    return verdict.check_fired(CheckId(check))


# Checks that share one classification and always fire together.
CHECK_GROUPS: dict[str, frozenset[str]] = {
    CheckId.R_LON.value: frozenset({CheckId.R_LON.value, CheckId.R_LAT.value}),
    CheckId.R_LAT.value: frozenset({CheckId.R_LON.value, CheckId.R_LAT.value}),
}


def collateral_checks(verdicts: list[Verdict], check: str) -> list[str]:
    """Checks other than ``check`` (and its group) that fired in any frame."""
    names = [c.value for c in CHECK_ORDER] + [INPUT_VALID]
    target = CHECK_GROUPS.get(check, frozenset({check}))
    return [name for name in names if name not in target and any(_fired(v, name) for v in verdicts)]


def grade_specific_check(scenario: Scenario, verdicts: list[Verdict], check: str) -> GradeResult:
    """
    Grade a single-check scenario against the check's direct oracle.

    The check must fire in exactly the frames where the oracle reports a
    violation, and in at least one frame. Checks without a direct oracle
    (``r_lon``, ``r_lat``) must fire at least once. No other check may
    fire in any frame.
    """
    fire_time = first_fire(verdicts)
    fired = [_fired(v, check) for v in verdicts]
    if not any(fired):
        return GradeResult(passed=False, reason=f"missed: {check} never fired", fire_time=fire_time)

    collateral = collateral_checks(verdicts, check)
    if collateral:
        return GradeResult(
            passed=False,
            reason=f"collateral: {', '.join(collateral)} fired besides {check}",
            fire_time=fire_time,
        )

    oracle = ORACLES.get(check)
    if oracle is None:
        return GradeResult(passed=True, reason="ok", fire_time=fire_time)

    for frame, verdict, did_fire in zip(scenario.frames, verdicts, fired):
        expected = oracle(frame, scenario)
        if did_fire and not expected:
            return GradeResult(
                passed=False,
                reason=f"premature: {check} fired at t={verdict.t_abs} where its oracle holds",
                fire_time=fire_time,
            )
        if expected and not did_fire:
            return GradeResult(
                passed=False,
                reason=f"missed: {check} silent at t={verdict.t_abs} where its oracle is violated",
                fire_time=fire_time,
            )
    return GradeResult(passed=True, reason="ok", fire_time=fire_time)


def grade_scenario(
    scenario: Scenario, verdicts: list[Verdict]
) -> tuple[GradeResult, SafetyEnvelope | None]:
    """
    Grade a replay according to the scenario's expectation.

    Returns:
        Grade and the envelope used (None for non-envelope grading)

    Raises:
        EnvelopeNotApplicableError: If a collision expectation has no envelope ground truth
    """
    kind = scenario.expected.kind
    if kind == ExpectationKind.NO_FIRE:
        result, envelope = grade_no_fire(verdicts), None
    elif kind == ExpectationKind.FIRE_IN_ENVELOPE:
        envelope = scenario.envelope or ground_truth_envelope(scenario)
        result = grade(verdicts, envelope)
    else:
        result, envelope = grade_specific_check(scenario, verdicts, scenario.expected.check), None

    log = logger.info if result.passed else logger.warning
    log(f"Scenario {scenario.name}: {'PASS' if result.passed else 'FAIL'} ({result.reason})")
    return result, envelope
