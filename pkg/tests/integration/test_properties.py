"""
Property-based tests of the supervisor state machine and the safety checks.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.models.safety import CHECK_ORDER, CheckId, CheckResult, RssParameters, RuleSet
from src.models.scenario import SafetyEnvelope
from src.models.trajectory import TrajectoryKind
from src.models.vehicle import ObjectState
from src.models.verdict import Action, SupervisorState, TrajectoryAssessment, Verdict
from src.services.geometry import (
    footprint_corners,
    polygons_from_corners,
    signed_distances_to_bounds,
)
from src.services.grading import grade
from src.services.rss import rss_lat_min_gap, rss_lon_min_gap
from src.services.safety_checks import check_dynamic_objects, check_friction
from src.services.scenario_library import race_car, straight_track
from src.services.supervisor import evaluate_step
from tests.conftest import make_braking, make_snapshot, make_straight

pytestmark = pytest.mark.integration

TRACK = straight_track()
VEHICLE = race_car()
RSS = RssParameters()

SAFE_DRIVING = make_straight()
UNSAFE_DRIVING = make_straight(v=90.0)
SAFE_EMERGENCY = make_braking()
UNSAFE_EMERGENCY = make_straight(kind=TrajectoryKind.EMERGENCY)

steps = st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=12)
speeds = st.floats(min_value=0.0, max_value=60.0, allow_nan=False)


def rated(ratings: list[bool], dt: float = 1.0) -> list[Verdict]:
    """One verdict per rating, the rules check carrying the failure."""
    verdicts = []
    for i, safe in enumerate(ratings):
        failing = set() if safe else {CheckId.RULES}
        checks = tuple(
            CheckResult(name=c, margin=-1.0 if c in failing else 1.0, safe=c not in failing)
            for c in CHECK_ORDER
        )
        assessment = TrajectoryAssessment(checks=checks, safe=safe)
        action = Action.EXECUTE_DRIVING if safe else Action.EXECUTE_STORED_EMERGENCY
        verdict = Verdict(
            t_abs=i * dt, driving=assessment, emergency=assessment, s_tot=safe, action=action
        )
        verdicts.append(verdict)
    return verdicts


class TestSupervisorStateMachine:
    """Test the fallback invariants over random step sequences."""

    @settings(max_examples=40, deadline=None)
    @given(steps)
    def test_verdict_invariants(self, sequence):
        """Test conjunction semantics, recovery and the fault condition."""
        state = SupervisorState()
        stored = None
        for k, (driving_safe, emergency_safe) in enumerate(sequence):
            verdict, state = evaluate_step(
                state,
                make_snapshot(t_abs=0.1 * k),
                SAFE_DRIVING if driving_safe else UNSAFE_DRIVING,
                SAFE_EMERGENCY if emergency_safe else UNSAFE_EMERGENCY,
                TRACK,
                VEHICLE,
                RSS,
                RuleSet(),
            )

            assert verdict.safe_driving == driving_safe
            assert verdict.safe_emergency == emergency_safe
            assert verdict.s_tot == (driving_safe and emergency_safe)

            if verdict.s_tot:
                assert verdict.action == Action.EXECUTE_DRIVING
                stored = SAFE_EMERGENCY
            elif stored is not None:
                assert verdict.action == Action.EXECUTE_STORED_EMERGENCY
            else:
                assert verdict.action == Action.FULL_BRAKE_FAULT
            assert state.stored_emergency == stored


class TestCheckProperties:
    """Test monotonicity and geometric invariants."""

    @given(speeds, speeds, speeds)
    def test_lon_gap_monotone_in_rear_speed(self, v_f, v_r, extra):
        """Test that a faster rear vehicle never needs a smaller gap."""
        assert rss_lon_min_gap(v_f, v_r + extra, RSS) >= rss_lon_min_gap(v_f, v_r, RSS)

    @given(speeds, speeds)
    def test_lon_gap_non_negative(self, v_f, v_r):
        """Test that the minimum gap is never negative."""
        assert rss_lon_min_gap(v_f, v_r, RSS) >= 0.0

    @given(st.floats(-5.0, 5.0), st.floats(-5.0, 5.0))
    def test_lat_gap_at_least_margin(self, v1, v2):
        """Test that the lateral gap never drops below the fluctuation margin."""
        assert rss_lat_min_gap(v1, v2, RSS) >= RSS.mu_lat_margin

    @settings(deadline=None)
    @given(st.floats(0.0, 12.0), st.floats(0.3, 1.5), st.floats(0.0, 2.0))
    def test_friction_margin_decreases_with_demand(self, ax, mu, extra):
        """Test that more acceleration never increases the friction margin."""
        low = check_friction(make_straight(v=0.0, ax=ax, points=2), mu, VEHICLE)
        high = check_friction(make_straight(v=0.0, ax=ax + extra, points=2), mu, VEHICLE)
        assert high.margin <= low.margin

    @given(
        st.floats(-100.0, 100.0), st.floats(-100.0, 100.0), st.floats(-np.pi, np.pi),
        st.floats(0.5, 6.0), st.floats(0.5, 3.0),
    )
    def test_footprint_preserves_size(self, x, y, psi, length, width):
        """Test that rotated footprints keep their side lengths."""
        corners = footprint_corners(np.array([x]), np.array([y]), np.array([psi]), length, width)[0]
        sides = np.hypot(*np.diff(np.vstack((corners, corners[:1])), axis=0).T)

        np.testing.assert_allclose(sorted(sides), sorted([length, length, width, width]), rtol=1e-9)

    @settings(deadline=None)
    @given(
        st.floats(1.0, 40.0), st.floats(1.0, 2.0), st.floats(-0.05, 0.05),
        st.floats(-8.0, 8.0), st.floats(0.3, 1.5),
    )
    def test_friction_margin_decreases_with_speed(self, v, scale, kappa, ax, mu):
        """Test that driving the same path faster never increases the friction margin."""
        slow = check_friction(make_straight(v=v, kappa=kappa, ax=ax, points=2), mu, VEHICLE)
        fast = check_friction(make_straight(v=v * scale, kappa=kappa, ax=ax, points=2), mu, VEHICLE)
        assert fast.margin <= slow.margin + 1e-12

    @settings(max_examples=60, deadline=None)
    @given(
        st.floats(-60.0, 60.0), st.floats(-5.0, 5.0), st.floats(0.1, 1.0),
        st.floats(0.0, 40.0), st.booleans(),
    )
    def test_closer_object_never_safer(self, dx, dy, scale, v, rear_rule):
        """Test that moving an object toward the ego on both axes never makes the plan safer."""
        trajectory = make_straight(v=v, points=10)
        rules = RuleSet(rear_responsibility_enabled=rear_rule)
        far = check_dynamic_objects(
            trajectory, (ObjectState(id="o", x=dx, y=dy, v=v),), TRACK, VEHICLE, RSS, rules
        )
        closer = ObjectState(id="o", x=scale * dx, y=scale * dy, v=v)
        near = check_dynamic_objects(trajectory, (closer,), TRACK, VEHICLE, RSS, rules)

        assert near[0].margin <= far[0].margin + 1e-9
        assert near[1].margin <= far[1].margin + 1e-9
        if not far[0].safe:
            assert not near[0].safe

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-200.0 + 10.0, 1200.0 - 10.0), st.floats(-0.5, 0.5))
    def test_bound_clearance_continuous(self, x, psi):
        """Test that a small lateral shift changes the signed clearance by at most the shift."""
        step = 0.01
        y = np.arange(3.0, 7.0, step)
        corners = footprint_corners(
            np.full(y.size, x), y, np.full(y.size, psi), VEHICLE.length, VEHICLE.width
        )
        clearance = signed_distances_to_bounds(polygons_from_corners(corners), TRACK)

        assert np.all(np.abs(np.diff(clearance)) <= step + 1e-6)


class TestGradeProperties:
    """Test the grading rule over random rating sequences."""

    @given(
        st.lists(st.booleans(), min_size=1, max_size=20),
        st.floats(0.0, 20.0), st.floats(0.0, 10.0),
        st.floats(0.0, 5.0), st.floats(0.0, 5.0),
    )
    def test_widening_envelope_keeps_pass(self, ratings, t_earliest, width, earlier, later):
        """Test that a passing grade survives a wider envelope."""
        verdicts = rated(ratings)
        envelope = SafetyEnvelope(t_earliest=t_earliest, t_latest=t_earliest + width)
        wider = SafetyEnvelope(t_earliest=t_earliest - earlier, t_latest=t_earliest + width + later)

        if grade(verdicts, envelope).passed:
            assert grade(verdicts, wider).passed
