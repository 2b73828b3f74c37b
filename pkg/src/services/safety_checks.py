"""
Trajectory Supervisor - Safety Check Service

One evaluation metric per safety criterion. Every check returns a signed
margin (non-negative when satisfied) and a Boolean classification, and is
evaluated vectorised over all trajectory points.
"""

import logging
from typing import Literal

import numpy as np

from src.models.safety import MARGIN_SENTINEL, CheckId, CheckResult, RssParameters, RuleSet
from src.models.track import TrackMap
from src.models.trajectory import Trajectory, TrajectoryArrays, TrajectoryPoint
from src.models.vehicle import GRAVITY, ObjectState, Pose, VehicleParameters
from src.services.frenet import project_points
from src.services.geometry import (
    footprint_corners,
    polygons_from_corners,
    signed_distances_to_bounds,
)
from src.services.rss import lon_min_gap, rss_lat_min_gap
from src.utils.helpers import normalize_angle

logger = logging.getLogger(__name__)


def _vacuous(check_id: CheckId, detail: str | None = None) -> CheckResult:
    return CheckResult(name=check_id, margin=MARGIN_SENTINEL, safe=True, detail=detail)


def _columns(trajectory: Trajectory, arrays: TrajectoryArrays | None) -> TrajectoryArrays:
    return TrajectoryArrays.of(trajectory) if arrays is None else arrays


def _from_margins(check_id: CheckId, margins: np.ndarray, detail: str | None = None) -> CheckResult:
    if margins.size == 0:
        return _vacuous(check_id, "no trajectory points")
    worst = int(np.argmin(margins))
    margin = float(margins[worst])
    return CheckResult(
        name=check_id,
        margin=margin,
        safe=bool(margin >= 0.0),
        worst_index=worst,
        detail=detail,
    )


def check_static_collision(
    trajectory: Trajectory,
    track: TrackMap,
    params: VehicleParameters,
    pose_reference: Literal["center", "rear_axle"] = "center",
    arrays: TrajectoryArrays | None = None,
) -> CheckResult:
    """
    Forward collision check of the ego footprint against the track bounds (``s_stat``).

    Args:
        trajectory: Candidate trajectory
        track: Track map
        params: Vehicle parameters
        pose_reference: Whether trajectory points denote the center or the rear axle

    Returns:
        Margin = smallest signed bound clearance over all points [m]
    """
    arrays = _columns(trajectory, arrays)
    if len(arrays) == 0:
        return _vacuous(CheckId.S_STAT, "no trajectory points")

    offset = params.rear_axle_offset if pose_reference == "rear_axle" else 0.0
    corners = footprint_corners(arrays.x, arrays.y, arrays.psi, params.length, params.width, offset)
    clearance = signed_distances_to_bounds(polygons_from_corners(corners), track)
    return _from_margins(CheckId.S_STAT, clearance)


def check_pose_match(
    trajectory: Trajectory,
    ego_pose: Pose | tuple[float, float],
    threshold: float,
    match_window: int,
) -> CheckResult:
    """
    Check that the trajectory hosts a coordinate near the ego pose (``pose_match``).

    Args:
        trajectory: Candidate trajectory
        ego_pose: Localised ego pose (or (x, y))
        threshold: Largest admissible distance [m]
        match_window: Number of leading points considered

    Returns:
        Margin = threshold minus the smallest distance [m]
    """
    if threshold <= 0 or match_window < 1:
        raise ValueError("Pose matching needs threshold > 0 and match_window >= 1")

    ex, ey = (ego_pose.x, ego_pose.y) if isinstance(ego_pose, Pose) else ego_pose
    window = trajectory.points[:match_window]
    if not window:
        return CheckResult(
            name=CheckId.POSE_MATCH, margin=-MARGIN_SENTINEL, safe=False, detail="no trajectory points"
        )

    xy = np.array([(p.x, p.y) for p in window], dtype=float)
    distance = np.hypot(xy[:, 0] - ex, xy[:, 1] - ey)
    nearest = int(np.argmin(distance))
    margin = float(threshold - distance[nearest])
    return CheckResult(
        name=CheckId.POSE_MATCH, margin=margin, safe=bool(margin >= 0.0), worst_index=nearest
    )


def combined_accel_forces(
    v: np.ndarray, kappa: np.ndarray, ax: np.ndarray, mass: float
) -> np.ndarray:
    """Total acceleration force m * sqrt(ax^2 + (v^2 kappa)^2) per point [N]."""
    a_lat = v * v * kappa
    return mass * np.sqrt(ax * ax + a_lat * a_lat)


def combined_accel_force(point: TrajectoryPoint, mass: float) -> float:
    """
    Total acceleration force acting on the vehicle at one point.

    Args:
        point: Trajectory point (v, kappa, ax)
        mass: Vehicle mass [kg]

    Returns:
        Force [N]
    """
    return float(
        combined_accel_forces(
            np.array([point.v]), np.array([point.kappa]), np.array([point.ax]), mass
        )[0]
    )


def friction_margins(
    arrays: TrajectoryArrays, mu: np.ndarray | float, params: VehicleParameters
) -> np.ndarray:
    """Per-point friction margin (mu m g - F) / (m g), dimensionless."""
    normal = params.mass * GRAVITY
    force = combined_accel_forces(arrays.v, arrays.kappa, arrays.ax, params.mass)
    return (np.asarray(mu, dtype=float) * normal - force) / normal


def check_friction(
    trajectory: Trajectory,
    mu: np.ndarray | float,
    params: VehicleParameters,
    arrays: TrajectoryArrays | None = None,
) -> CheckResult:
    """
    Check combined acceleration against the friction circle (``a_comb``).

    Args:
        trajectory: Candidate trajectory
        mu: Friction coefficient, scalar or one value per point
        params: Vehicle parameters

    Returns:
        Margin in units of g

    Raises:
        ValueError: If mu is not positive or does not match the trajectory length
    """
    arrays = _columns(trajectory, arrays)
    mu_values = np.asarray(mu, dtype=float)
    if np.any(mu_values <= 0):
        raise ValueError("Friction coefficient must be positive")
    if mu_values.ndim and mu_values.shape != (len(arrays),):
        raise ValueError("Per-point friction needs one value per trajectory point")
    return _from_margins(CheckId.A_COMB, friction_margins(arrays, mu_values, params))


def dynamic_limit_margins(arrays: TrajectoryArrays, params: VehicleParameters) -> np.ndarray:
    """Per-point smallest normalised slack of curvature, braking and engine limits."""
    curvature = 1.0 - np.abs(arrays.kappa) * params.turn_radius_min
    braking = (arrays.ax + params.a_brake_max) / params.a_brake_max
    engine_limit = params.engine_accel(arrays.v)
    engine = np.where(
        engine_limit > 0.0,
        (engine_limit - arrays.ax) / np.where(engine_limit > 0.0, engine_limit, 1.0),
        -arrays.ax,
    )
    return np.minimum(np.minimum(curvature, braking), engine)


def check_dynamic_limits(
    trajectory: Trajectory, params: VehicleParameters, arrays: TrajectoryArrays | None = None
) -> CheckResult:
    """
    Compare curvature and acceleration against the vehicle's physical limits (``dyn_limits``).

    Safe iff at every point |kappa| * turn_radius_min <= 1 and
    -a_brake_max <= ax <= a_accel_engine(v).
    """
    arrays = _columns(trajectory, arrays)
    return _from_margins(CheckId.DYN_LIMITS, dynamic_limit_margins(arrays, params))


def rule_margins(arrays: TrajectoryArrays, rules: RuleSet) -> np.ndarray | None:
    """Per-point smallest normalised rule slack, or None when no scalar rule is enabled."""
    slacks = []
    if rules.v_max is not None:
        slacks.append((rules.v_max - arrays.v) / rules.v_max)
    if rules.a_lon_max is not None:
        slacks.append((rules.a_lon_max - np.abs(arrays.ax)) / rules.a_lon_max)
    if not slacks:
        return None
    return np.minimum.reduce(slacks)


def check_rules(
    trajectory: Trajectory, rules: RuleSet, arrays: TrajectoryArrays | None = None
) -> CheckResult:
    """
    Evaluate the enabled rules of conduct (``rules``).

    Returns:
        Margin = smallest normalised slack; the sentinel when every rule is disabled
    """
    margins = rule_margins(_columns(trajectory, arrays), rules)
    if margins is None:
        return _vacuous(CheckId.RULES, "no rule enabled")
    return _from_margins(CheckId.RULES, margins)


def longitudinal_gap(ds: np.ndarray, track: TrackMap, multi_lap_gaps: bool) -> np.ndarray:
    """
    Longitudinal center gap (object minus ego) along the driving direction.

    On closed tracks the gap at the first trajectory point is the nearer
    directed gap; later points follow it continuously. With multi-lap
    reasoning every point takes the nearer directed gap independently.
    """
    if not track.closed:
        return ds
    length = track.total_length
    wrapped = ds - length * np.floor(ds / length + 0.5)
    if multi_lap_gaps:
        return wrapped
    return np.unwrap(wrapped, period=length, axis=-1)


def check_dynamic_objects(
    trajectory: Trajectory,
    objects: tuple[ObjectState, ...] | list[ObjectState],
    track: TrackMap,
    params: VehicleParameters,
    rss: RssParameters,
    rules: RuleSet,
    pose_reference: Literal["center", "rear_axle"] = "center",
    corridor_width: float | None = None,
    multi_lap_gaps: bool = False,
    arrays: TrajectoryArrays | None = None,
) -> tuple[CheckResult, CheckResult]:
    """
    Worst-case distance check against other traffic participants (``r_lon``, ``r_lat``).

    Ego and objects are decomposed into track coordinates; objects keep
    their current velocity in the track frame over the trajectory horizon.
    A point is dangerous iff both the longitudinal and the lateral gap are
    within their minimum safe gaps and the ego is not exempt by the
    rear-responsibility rule (ego rear axle strictly ahead of the object
    front). Margins are the smallest gap slacks over all points and objects
    and may be negative while the trajectory is rated safe.

    Raises:
        OutOfCorridorError: If the ego or an object lies outside the corridor
    """
    arrays = _columns(trajectory, arrays)
    if not objects or len(arrays) == 0:
        detail = "no objects" if not objects else "no trajectory points"
        return _vacuous(CheckId.R_LON, detail), _vacuous(CheckId.R_LAT, detail)

    offset = params.rear_axle_offset if pose_reference == "rear_axle" else 0.0
    ego_xy = np.column_stack(
        (arrays.x + offset * np.cos(arrays.psi), arrays.y + offset * np.sin(arrays.psi))
    )
    obj_xy = np.array([(o.x, o.y) for o in objects], dtype=float)
    frenet = project_points(np.vstack((ego_xy, obj_xy)), track, corridor_width)
    n_points = len(arrays)

    s_e, n_e = frenet.s[:n_points], frenet.n[:n_points]
    rel_e = normalize_angle(arrays.psi - frenet.heading[:n_points])
    v_e_lon = np.maximum(arrays.v * np.cos(rel_e), 0.0)
    v_e_lat = arrays.v * np.sin(rel_e)

    # Objects: shape (M, 1) against ego points (N,)
    obj_v = np.array([o.v for o in objects], dtype=float)
    obj_psi = np.array([o.psi for o in objects], dtype=float)
    obj_len = np.array([o.length for o in objects], dtype=float)[:, None]
    obj_wid = np.array([o.width for o in objects], dtype=float)[:, None]
    rel_o = normalize_angle(obj_psi - frenet.heading[n_points:])
    v_o_lon = obj_v * np.cos(rel_o)
    v_o_lat = obj_v * np.sin(rel_o)

    t = arrays.t - arrays.t[0]
    s_o = frenet.s[n_points:, None] + v_o_lon[:, None] * t
    n_o = frenet.n[n_points:, None] + v_o_lat[:, None] * t
    v_o_lon = np.maximum(v_o_lon, 0.0)[:, None]
    v_o_lat = v_o_lat[:, None]

    ds = longitudinal_gap(s_o - s_e, track, multi_lap_gaps)
    d_lon = np.abs(ds) - 0.5 * (params.length + obj_len)
    d_lat = np.abs(n_o - n_e) - 0.5 * (params.width + obj_wid)

    # Longitudinal roles: ego is rear when the object is ahead.
    obj_a_br = np.array([o.a_brake_max or rss.a_f_br for o in objects], dtype=float)[:, None]
    obj_a_acc = np.array([o.a_accel_max or rss.a_r_acc for o in objects], dtype=float)[:, None]
    d_min_lon = np.where(
        ds >= 0.0,
        lon_min_gap(v_o_lon, v_e_lon, rss.rho, rss.a_r_acc, rss.a_r_br, obj_a_br),
        lon_min_gap(v_e_lon, v_o_lon, rss.rho, obj_a_acc, rss.a_r_br, rss.a_f_br),
    )

    side = np.where(n_o >= n_e, 1.0, -1.0)
    d_min_lat = rss_lat_min_gap(side * v_e_lat, -side * v_o_lat, rss)

    lon_margin = d_lon - d_min_lon
    lat_margin = d_lat - d_min_lat
    lon_unsafe = d_lon <= d_min_lon
    lat_unsafe = d_lat <= d_min_lat

    if rules.rear_responsibility_enabled:
        exempt = -ds - 0.5 * obj_len - params.rear_axle_offset > 0.0
    else:
        exempt = np.zeros_like(lon_unsafe)
    dangerous = lon_unsafe & lat_unsafe & ~exempt
    safe = not bool(dangerous.any())

    detail = None
    if not safe:
        k, i = np.unravel_index(int(np.argmax(dangerous)), dangerous.shape)
        detail = f"object {objects[k].id} within worst-case distance at point {i}"
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug(detail)

    def result(check_id: CheckId, margins: np.ndarray) -> CheckResult:
        flat = int(np.argmin(margins))
        _, point = np.unravel_index(flat, margins.shape)
        return CheckResult(
            name=check_id,
            margin=float(margins.flat[flat]),
            safe=safe,
            worst_index=int(point),
            detail=detail,
        )

    return result(CheckId.R_LON, lon_margin), result(CheckId.R_LAT, lat_margin)
