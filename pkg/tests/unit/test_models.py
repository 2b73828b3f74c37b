"""
Unit tests for the data models.

Tests validation rules and derived properties of the vehicle, track,
safety, scenario and report models.
"""

import math

import numpy as np
import pytest
from pydantic import TypeAdapter, ValidationError

from src.models.report import BatchEntry, BatchSummary, GradeResult, LatencyStats, RunReport
from src.models.safety import CHECK_ORDER, CheckId, RssParameters, RuleSet
from src.models.scenario import (
    AccelSpike,
    BoundCollision,
    EmergencyNoStop,
    Expectation,
    ExpectationKind,
    Fault,
    FrictionExceed,
    SafetyEnvelope,
)
from src.models.track import TrackMap
from src.models.trajectory import Trajectory, TrajectoryArrays, TrajectoryKind
from src.models.vehicle import GRAVITY, ObjectState, Pose, VehicleParameters
from src.models.verdict import PerceptionSnapshot


def vehicle_kwargs(**overrides):
    values = dict(
        mass=800.0,
        length=4.7,
        width=2.0,
        a_brake_max=10.0,
        a_accel_engine=((0.0, 12.0), (30.0, 9.0), (60.0, 6.0)),
        turn_radius_min=10.0,
    )
    values.update(overrides)
    return values


class TestVehicleParameters:
    """Test ego vehicle parameter validation."""

    def test_valid_parameters(self):
        """Test derived quantities of valid parameters."""
        params = VehicleParameters(**vehicle_kwargs())
        assert params.normal_force == pytest.approx(800.0 * GRAVITY)
        assert params.kappa_max == pytest.approx(0.1)
        assert params.rear_axle_offset == 1.5

    def test_engine_curve_interpolation(self):
        """Test linear interpolation and clamping of the engine curve."""
        params = VehicleParameters(**vehicle_kwargs())
        np.testing.assert_allclose(params.engine_accel(np.array([0.0, 15.0, 45.0, 100.0])), [12.0, 10.5, 7.5, 6.0])

    @pytest.mark.parametrize(
        "curve",
        [
            ((5.0, 10.0),),
            ((0.0, 10.0), (20.0, 8.0), (20.0, 6.0)),
            ((0.0, -1.0),),
        ],
    )
    def test_invalid_engine_curve(self, curve):
        """Test that malformed engine curves are rejected."""
        with pytest.raises(ValidationError):
            VehicleParameters(**vehicle_kwargs(a_accel_engine=curve))

    def test_rear_axle_outside_footprint(self):
        """Test that the rear axle must lie within the footprint."""
        with pytest.raises(ValidationError):
            VehicleParameters(**vehicle_kwargs(rear_axle_offset=3.0))

    @pytest.mark.parametrize("field", ["mass", "length", "width", "a_brake_max", "turn_radius_min"])
    def test_positive_fields(self, field):
        """Test that physical quantities must be positive."""
        with pytest.raises(ValidationError):
            VehicleParameters(**vehicle_kwargs(**{field: 0.0}))


class TestObjectState:
    """Test perceived object states."""

    def test_predict_constant_velocity(self):
        """Test constant-velocity prediction along the heading."""
        obj = ObjectState(id="a", x=1.0, y=2.0, psi=math.pi / 2, v=10.0)
        x, y = obj.predict(np.array([0.0, 1.0]))
        np.testing.assert_allclose(x, [1.0, 1.0], atol=1e-12)
        np.testing.assert_allclose(y, [2.0, 12.0])

    def test_id_is_trimmed(self):
        """Test that whitespace around identifiers is removed."""
        assert ObjectState(id="  car ", x=0.0, y=0.0).id == "car"

    def test_negative_speed_rejected(self):
        """Test that speeds are non-negative."""
        with pytest.raises(ValidationError):
            ObjectState(id="a", x=0.0, y=0.0, v=-1.0)


class TestTrajectory:
    """Test trajectory construction."""

    def test_from_arrays(self):
        """Test building a trajectory from columns."""
        traj = Trajectory.from_arrays(
            np.array([0.0, 0.1]), np.array([0.0, 1.0]), np.zeros(2), np.zeros(2),
            np.zeros(2), np.array([10.0, 10.0]), np.zeros(2), kind=TrajectoryKind.EMERGENCY,
        )
        assert len(traj) == 2
        assert traj.kind == TrajectoryKind.EMERGENCY
        assert traj.points[1].x == 1.0

    def test_from_arrays_length_mismatch(self):
        """Test that columns must have equal length."""
        with pytest.raises(ValueError):
            Trajectory.from_arrays(
                np.zeros(2), np.zeros(3), np.zeros(2), np.zeros(2), np.zeros(2), np.zeros(2), np.zeros(2)
            )

    def test_arrays_of_empty(self):
        """Test the column view of an empty trajectory."""
        arrays = TrajectoryArrays.of(Trajectory())
        assert len(arrays) == 0
        assert arrays.v.shape == (0,)


class TestTrackMap:
    """Test track map validation and geometry."""

    def test_straight_geometry(self, straight):
        """Test bounds and length of the straight test track."""
        assert straight.total_length == pytest.approx(1400.0)
        np.testing.assert_allclose(straight.bound_left[:, 1], 6.0)
        np.testing.assert_allclose(straight.bound_right[:, 1], -6.0)
        assert straight.corridor.area == pytest.approx(1400.0 * 12.0)

    def test_closed_length_includes_closing_segment(self, circle):
        """Test that a circuit's length includes the segment back to the start."""
        assert circle.closed
        assert circle.total_length == pytest.approx(2 * math.pi * 150.0, rel=1e-4)
        assert circle.wrap_s(circle.total_length + 1.0) == pytest.approx(1.0)

    def test_to_cartesian(self, straight):
        """Test reconstruction of Cartesian points from track coordinates."""
        point = straight.to_cartesian(np.array([200.0]), np.array([2.0]))
        np.testing.assert_allclose(point, [[0.0, 2.0]], atol=1e-9)

    def test_invalid_widths(self):
        """Test that the reference line must lie strictly between the bounds."""
        with pytest.raises(ValueError):
            TrackMap(
                s=np.array([0.0, 1.0]),
                reference=np.array([[0.0, 0.0], [1.0, 0.0]]),
                width_left=np.array([1.0, 0.0]),
                width_right=np.array([1.0, 1.0]),
            )

    def test_non_increasing_arc_length(self):
        """Test that arc length must increase strictly."""
        with pytest.raises(ValueError):
            TrackMap(
                s=np.array([0.0, 0.0]),
                reference=np.array([[0.0, 0.0], [1.0, 0.0]]),
                width_left=np.ones(2),
                width_right=np.ones(2),
            )

    def test_self_intersecting_bounds(self):
        """Test that a turn tighter than the bound width is rejected."""
        theta = np.linspace(-np.pi / 2, 0.0, 7)[1:]
        reference = np.vstack(
            (
                np.column_stack((np.arange(0.0, 11.0), np.zeros(11))),
                np.column_stack((10.0 + np.cos(theta), 1.0 + np.sin(theta))),
                np.column_stack((np.full(10, 11.0), np.arange(2.0, 12.0))),
            )
        )
        s = np.concatenate(([0.0], np.cumsum(np.hypot(*np.diff(reference, axis=0).T))))
        with pytest.raises(ValueError, match="self-intersect"):
            TrackMap(
                s=s,
                reference=reference,
                width_left=np.full(len(s), 3.0),
                width_right=np.ones(len(s)),
            )

    def test_mu_profile(self):
        """Test interpolation of the friction profile."""
        track = TrackMap(
            s=np.array([0.0, 10.0]),
            reference=np.array([[0.0, 0.0], [10.0, 0.0]]),
            width_left=np.ones(2),
            width_right=np.ones(2),
            mu=np.array([1.0, 0.5]),
        )
        assert track.mu_at(5.0) == pytest.approx(0.75)

    def test_no_mu_profile(self, straight):
        """Test that tracks without a profile report None."""
        assert straight.mu_at(1.0) is None


class TestPerceptionSnapshot:
    """Test the friction field of the perception snapshot."""

    def test_scalar_and_list(self):
        """Test that mu is a scalar or a per-point list."""
        pose = Pose(x=0.0, y=0.0)
        assert PerceptionSnapshot(t_abs=0.0, ego_pose=pose, mu=0.8).mu == 0.8
        assert PerceptionSnapshot(t_abs=0.0, ego_pose=pose, mu=[1.0, 0.7]).mu == (1.0, 0.7)

    @pytest.mark.parametrize("mu", [0.0, -1.0, (), (1.0, 0.0)])
    def test_invalid_mu(self, mu):
        """Test that friction values must be positive and a list non-empty."""
        with pytest.raises(ValidationError):
            PerceptionSnapshot(t_abs=0.0, ego_pose=Pose(x=0.0, y=0.0), mu=mu)


class TestSafetyModels:
    """Test RSS parameters and rules."""

    def test_check_order(self):
        """Test the stable check order."""
        assert [c.value for c in CHECK_ORDER] == [
            "s_stat", "r_lon", "r_lat", "pose_match", "a_comb", "dyn_limits", "rules",
        ]

    def test_rear_braking_may_not_exceed_front(self):
        """Test that the assured rear braking is bounded by the front braking."""
        with pytest.raises(ValidationError):
            RssParameters(a_r_br=12.0, a_f_br=8.0)
        assert RssParameters(a_r_br=8.0, a_f_br=12.0).a_r_br == 8.0

    def test_rule_defaults(self):
        """Test the default rule set."""
        rules = RuleSet()
        assert rules.v_max == 80.0
        assert rules.a_lon_max is None
        assert rules.rear_responsibility_enabled


class TestExpectation:
    """Test expectation parsing."""

    @pytest.mark.parametrize("text", ["no-fire", "fire-in-envelope", "fire:a_comb", "fire:input_valid"])
    def test_parse_round_trip(self, text):
        """Test that the textual form round-trips."""
        assert str(Expectation.parse(text)) == text

    def test_parse_specific_check(self):
        """Test parsing a single-check expectation."""
        expectation = Expectation.parse("fire: s_stat")
        assert expectation.kind == ExpectationKind.FIRE_SPECIFIC_CHECK
        assert expectation.check == "s_stat"
        assert Expectation.fire(CheckId.S_STAT) == expectation

    @pytest.mark.parametrize("text", ["sometimes", "fire:unknown", "fire"])
    def test_parse_invalid(self, text):
        """Test that unknown expectations are rejected."""
        with pytest.raises(ValueError):
            Expectation.parse(text)


class TestSafetyEnvelope:
    """Test the safety envelope model."""

    def test_order(self):
        """Test that t_earliest may not exceed t_latest."""
        with pytest.raises(ValidationError):
            SafetyEnvelope(t_earliest=2.0, t_latest=1.0)

    def test_fires(self):
        """Test that only finite envelopes require a fire."""
        assert SafetyEnvelope(t_earliest=1.0, t_latest=2.0).fires
        assert not SafetyEnvelope(t_earliest=math.inf, t_latest=math.inf).fires

    def test_infinite_envelope_serialises(self):
        """Test that an open envelope survives a JSON round trip."""
        envelope = SafetyEnvelope(t_earliest=1.0, t_latest=math.inf)
        restored = SafetyEnvelope.model_validate_json(envelope.model_dump_json())
        assert restored.t_latest == math.inf


class TestFaults:
    """Test fault models."""

    def test_discriminated_union(self):
        """Test that faults are selected by kind."""
        adapter = TypeAdapter(Fault)
        fault = adapter.validate_python({"kind": "accel-spike", "ax_add": 10.0})
        assert isinstance(fault, AccelSpike)
        assert fault.target_check == "dyn_limits"

    def test_identity(self):
        """Test identity parameters."""
        assert FrictionExceed(scale=1.0).is_identity
        assert not BoundCollision(offset=6.0).is_identity
        assert EmergencyNoStop(v_final=0.0).is_identity

    def test_targets(self):
        """Test the check each fault targets."""
        assert FrictionExceed(scale=1.3).target_check == "a_comb"
        assert BoundCollision(offset=6.0).target_check == "s_stat"
        assert EmergencyNoStop(v_final=2.0).target_check == "input_valid"


class TestReportModels:
    """Test latency statistics and summaries."""

    def test_latency_from_nanoseconds(self):
        """Test conversion to microseconds."""
        stats = LatencyStats.from_nanoseconds([1000, 2000, 3000])
        assert stats.samples == 3
        assert stats.median_us == pytest.approx(2.0)
        assert stats.max_us == pytest.approx(3.0)

    def test_latency_empty(self):
        """Test statistics without samples."""
        assert LatencyStats.from_nanoseconds([]).samples == 0

    def test_batch_summary(self):
        """Test pass counting and failure names."""
        latency = LatencyStats.from_nanoseconds([1000])

        def report(name, passed):
            return RunReport(
                scenario=name, expected="no-fire", frames=1, unsafe_frames=0,
                grade=GradeResult(passed=passed, reason="ok" if passed else "missed"), latency=latency,
            )

        summary = BatchSummary(
            entries=(
                BatchEntry(source="a.scenario", report=report("a", True)),
                BatchEntry(source="b.scenario", report=report("b", False)),
                BatchEntry(source="c.scenario", error="broken"),
            )
        )
        assert summary.total == 3
        assert summary.passed == 1
        assert summary.failures == ["b", "c.scenario"]
        assert not summary.all_passed
        assert not BatchSummary(entries=()).all_passed
