"""
Unit tests for the safety check service.
"""

import numpy as np
import pytest

from src.models.safety import MARGIN_SENTINEL, CheckId, RssParameters, RuleSet
from src.models.trajectory import Trajectory, TrajectoryPoint
from src.models.vehicle import GRAVITY, ObjectState, Pose
from src.services.frenet import OutOfCorridorError
from src.services.safety_checks import (
    check_dynamic_limits,
    check_dynamic_objects,
    check_friction,
    check_pose_match,
    check_rules,
    check_static_collision,
    combined_accel_force,
    longitudinal_gap,
)
from tests.conftest import make_straight


class TestStaticCollision:
    """Test the footprint-against-bounds check."""

    def test_centered_is_safe(self, straight, vehicle):
        """Test that a centered trajectory keeps 5 m to each bound."""
        result = check_static_collision(make_straight(), straight, vehicle)

        assert result.name == CheckId.S_STAT
        assert result.safe
        assert result.margin == pytest.approx(5.0, abs=1e-6)

    def test_crossing_bound_is_unsafe(self, straight, vehicle):
        """Test that a footprint crossing the bound yields a negative margin."""
        result = check_static_collision(make_straight(y=5.5), straight, vehicle)

        assert not result.safe
        assert result.margin == pytest.approx(-0.5, abs=1e-6)

    def test_worst_index(self, straight, vehicle):
        """Test that the worst point is reported."""
        n = 10
        t = np.arange(n) * 0.1
        drifting = Trajectory.from_arrays(
            t, 20.0 * t, np.linspace(0.0, 4.5, n), np.zeros(n), np.zeros(n), np.full(n, 20.0), np.zeros(n)
        )
        result = check_static_collision(drifting, straight, vehicle)

        assert result.safe
        assert result.worst_index == n - 1
        assert result.margin == pytest.approx(0.5, abs=1e-6)


class TestPoseMatch:
    """Test the ego-pose matching check."""

    def test_close_pose(self):
        """Test the margin for a pose near the first point."""
        result = check_pose_match(make_straight(), Pose(x=0.5, y=0.0), threshold=1.0, match_window=3)

        assert result.safe
        assert result.margin == pytest.approx(0.5)
        assert result.worst_index == 0

    def test_far_pose(self):
        """Test that a distant pose is unsafe."""
        result = check_pose_match(make_straight(), (0.0, 3.0), threshold=1.0, match_window=3)

        assert not result.safe
        assert result.margin == pytest.approx(-2.0)

    def test_off_line_point(self):
        """Test the margin against the nearest point of the window."""
        trajectory = Trajectory.from_arrays(
            [0.0, 0.1, 0.2], [0.2, 5.0, 10.0], [0.1, 0.0, 0.0],
            [0.0] * 3, [0.0] * 3, [1.0] * 3, [0.0] * 3,
        )
        result = check_pose_match(trajectory, (0.0, 0.0), threshold=1.0, match_window=3)

        assert result.margin == pytest.approx(1.0 - np.sqrt(0.05))
        assert result.margin == pytest.approx(0.7764, abs=1e-4)
        assert result.worst_index == 0

    @pytest.mark.parametrize("window,expected", [(3, -1.0), (4, 1.0)])
    def test_match_window(self, window, expected):
        """Test that only the leading points are considered."""
        # Points at x = 0, 2, 4, 6, ...
        result = check_pose_match(make_straight(), (6.0, 0.0), threshold=1.0, match_window=window)
        assert result.margin == pytest.approx(expected)

    @pytest.mark.parametrize("threshold,window", [(0.0, 3), (1.0, 0)])
    def test_invalid_parameters(self, threshold, window):
        """Test that non-positive thresholds and empty windows are rejected."""
        with pytest.raises(ValueError):
            check_pose_match(make_straight(), (0.0, 0.0), threshold=threshold, match_window=window)


class TestFriction:
    """Test the combined-acceleration check."""

    def test_combined_force(self):
        """Test the force of a point with longitudinal and lateral acceleration."""
        point = TrajectoryPoint(t=0.0, x=0.0, y=0.0, v=20.0, kappa=0.01, ax=3.0)
        assert combined_accel_force(point, 800.0) == pytest.approx(800.0 * 5.0)

    def test_exceeding_friction(self, vehicle):
        """Test that 10 m/s^2 on dry asphalt exceeds the friction circle."""
        result = check_friction(make_straight(v=0.0, ax=10.0), 1.0, vehicle)

        assert not result.safe
        assert result.margin == pytest.approx((GRAVITY - 10.0) / GRAVITY)

    def test_within_reduced_friction(self, vehicle):
        """Test a safe point at a reduced friction coefficient."""
        result = check_friction(make_straight(v=0.0, ax=5.0), 0.6, vehicle)

        assert result.safe
        assert result.margin == pytest.approx((0.6 * GRAVITY - 5.0) / GRAVITY)

    def test_lateral_share(self, vehicle):
        """Test that cornering load counts against the friction circle."""
        result = check_friction(make_straight(v=20.0, kappa=0.01, ax=3.0), 1.0, vehicle)
        assert result.margin == pytest.approx((GRAVITY - 5.0) / GRAVITY)

    def test_per_point_friction(self, vehicle):
        """Test that a per-point profile picks the worst point."""
        trajectory = make_straight(v=0.0, ax=5.0, points=4)
        result = check_friction(trajectory, np.array([1.0, 1.0, 0.4, 1.0]), vehicle)

        assert not result.safe
        assert result.worst_index == 2

    def test_profile_length_mismatch(self, vehicle):
        """Test that a per-point profile must match the trajectory."""
        with pytest.raises(ValueError):
            check_friction(make_straight(points=4), np.array([1.0, 1.0]), vehicle)

    def test_non_positive_friction(self, vehicle):
        """Test that friction must be positive."""
        with pytest.raises(ValueError):
            check_friction(make_straight(), 0.0, vehicle)


class TestDynamicLimits:
    """Test the vehicle-limit check."""

    def test_nominal(self, vehicle):
        """Test that a cruising straight has full slack."""
        result = check_dynamic_limits(make_straight(v=20.0), vehicle)

        assert result.safe
        assert result.margin == pytest.approx(1.0)

    def test_curvature(self, vehicle):
        """Test the normalised curvature slack."""
        assert check_dynamic_limits(make_straight(kappa=0.05), vehicle).margin == pytest.approx(0.5)
        assert not check_dynamic_limits(make_straight(kappa=0.2), vehicle).safe

    def test_braking(self, vehicle):
        """Test braking at and beyond the limit."""
        assert check_dynamic_limits(make_straight(ax=-10.0), vehicle).safe
        over = check_dynamic_limits(make_straight(ax=-12.0), vehicle)
        assert not over.safe
        assert over.margin == pytest.approx(-0.2)

    def test_engine(self, vehicle):
        """Test acceleration against the speed-dependent engine limit."""
        # Engine limit at 20 m/s is 10 m/s^2.
        over = check_dynamic_limits(make_straight(v=20.0, ax=11.0), vehicle)
        assert not over.safe
        assert over.margin == pytest.approx(-0.1)
        assert check_dynamic_limits(make_straight(v=20.0, ax=5.0), vehicle).safe


class TestRules:
    """Test the rules-of-conduct check."""

    def test_speed_limit(self):
        """Test the normalised speed slack."""
        assert check_rules(make_straight(v=20.0), RuleSet()).margin == pytest.approx(0.75)
        over = check_rules(make_straight(v=90.0), RuleSet())
        assert not over.safe
        assert over.margin == pytest.approx(-0.125)

    def test_longitudinal_acceleration_limit(self):
        """Test the acceleration rule."""
        result = check_rules(make_straight(ax=-6.0), RuleSet(v_max=None, a_lon_max=5.0))

        assert not result.safe
        assert result.margin == pytest.approx(-0.2)

    def test_all_disabled(self):
        """Test that a rule set without rules is vacuously satisfied."""
        result = check_rules(make_straight(v=200.0), RuleSet(v_max=None))

        assert result.safe
        assert result.margin == MARGIN_SENTINEL


class TestDynamicObjects:
    """Test the worst-case distance check against traffic."""

    def check(self, trajectory, objects, straight, vehicle, rss, rules=None):
        return check_dynamic_objects(trajectory, objects, straight, vehicle, rss, rules or RuleSet())

    def test_no_objects(self, straight, vehicle, rss):
        """Test that an empty scene is vacuously safe."""
        r_lon, r_lat = self.check(make_straight(), (), straight, vehicle, rss)

        assert r_lon.safe and r_lat.safe
        assert r_lon.margin == MARGIN_SENTINEL
        assert r_lat.name == CheckId.R_LAT

    def test_distant_leader(self, straight, vehicle, rss):
        """Test that a far object ahead is safe."""
        leader = ObjectState(id="lead", x=500.0, y=0.0, v=20.0)
        r_lon, r_lat = self.check(make_straight(), (leader,), straight, vehicle, rss)

        assert r_lon.safe and r_lat.safe
        assert r_lon.margin > 0.0

    def test_close_stopped_leader(self, straight, vehicle, rss):
        """Test that a stopped object just ahead in the lane is dangerous."""
        leader = ObjectState(id="lead", x=15.0, y=0.0, v=0.0)
        r_lon, r_lat = self.check(make_straight(), (leader,), straight, vehicle, rss)

        assert not r_lon.safe and not r_lat.safe
        assert r_lon.margin < 0.0
        assert "lead" in r_lon.detail

    def test_adjacent_lane(self, straight, vehicle, rss):
        """Test that lateral separation alone keeps a close object safe."""
        neighbour = ObjectState(id="side", x=15.0, y=4.0, v=0.0)
        r_lon, r_lat = self.check(make_straight(), (neighbour,), straight, vehicle, rss)

        assert r_lon.safe and r_lat.safe
        assert r_lon.margin < 0.0
        assert r_lat.margin > 0.0

    @pytest.mark.parametrize("x,safe", [(10.0, False), (11.0, True)])
    def test_gap_equal_to_minimum_is_unsafe(self, straight, vehicle, x, safe):
        """Test that a gap exactly at the worst-case distance counts as dangerous."""
        ego = vehicle.model_copy(update={"length": 4.0})
        rss = RssParameters(rho=0.0, a_r_br=3.0)
        leader = ObjectState(id="lead", x=x, y=0.0, v=0.0, length=4.0)
        # d_min = 6^2 / (2*3) = 6; d_lon = x - 4
        r_lon, _ = self.check(make_straight(v=6.0, points=1), (leader,), straight, ego, rss)

        assert r_lon.safe is safe
        assert r_lon.margin == pytest.approx(x - 10.0)

    def test_rear_responsibility(self, straight, vehicle, rss):
        """Test that a close follower does not make the ego unsafe."""
        follower = ObjectState(id="rear", x=-10.0, y=0.0, v=20.0)

        r_lon, _ = self.check(make_straight(), (follower,), straight, vehicle, rss)
        assert r_lon.safe
        assert r_lon.margin < 0.0

        r_lon, _ = self.check(
            make_straight(), (follower,), straight, vehicle, rss,
            RuleSet(rear_responsibility_enabled=False),
        )
        assert not r_lon.safe

    def test_object_braking_override(self, straight, vehicle, rss):
        """Test that a weaker-braking leader needs a smaller gap."""
        strong = ObjectState(id="a", x=60.0, y=0.0, v=20.0)
        weak = ObjectState(id="b", x=60.0, y=0.0, v=20.0, a_brake_max=5.0)
        r_strong, _ = self.check(make_straight(), (strong,), straight, vehicle, rss)
        r_weak, _ = self.check(make_straight(), (weak,), straight, vehicle, rss)

        assert r_weak.margin > r_strong.margin

    def test_out_of_corridor(self, straight, vehicle, rss):
        """Test that an object far off the track is reported."""
        stray = ObjectState(id="stray", x=10.0, y=100.0)
        with pytest.raises(OutOfCorridorError):
            check_dynamic_objects(
                make_straight(), (stray,), straight, vehicle, rss, RuleSet(), corridor_width=50.0
            )


class TestLongitudinalGap:
    """Test track-coordinate gaps on open and closed tracks."""

    def test_open_track_unchanged(self, straight):
        """Test that open tracks use the raw difference."""
        ds = np.array([[-30.0, 700.0]])
        np.testing.assert_allclose(longitudinal_gap(ds, straight, False), ds)

    def test_closed_track_nearer_gap(self, circle):
        """Test that a gap just short of a lap is a small negative gap."""
        length = circle.total_length
        gap = longitudinal_gap(np.array([[length - 10.0, length - 5.0]]), circle, False)
        np.testing.assert_allclose(gap, [[-10.0, -5.0]])

    def test_closed_track_continuity(self, circle):
        """Test that later points follow the first point across half a lap."""
        length = circle.total_length
        ds = np.array([[0.4 * length, 0.6 * length]])

        np.testing.assert_allclose(longitudinal_gap(ds, circle, False), [[0.4 * length, 0.6 * length]])
        np.testing.assert_allclose(longitudinal_gap(ds, circle, True), [[0.4 * length, -0.4 * length]])
