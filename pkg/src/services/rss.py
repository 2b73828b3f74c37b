"""
Trajectory Supervisor - Worst-Case Distance Service

Closed-form minimum safe gaps of the responsibility-sensitive safety model
and the discrete-time worst-case simulations used to cross-check them.
All functions broadcast over numpy arrays.
"""

import math

import numpy as np

from src.models.safety import RssParameters

ArrayLike = np.ndarray | float

# Step of the worst-case manoeuvre simulations [s].
SIMULATION_DT = 1e-3


def _as_result(value: np.ndarray) -> np.ndarray | float:
    return float(value) if np.ndim(value) == 0 else value


def lon_min_gap(
    v_f: ArrayLike,
    v_r: ArrayLike,
    rho: ArrayLike,
    a_r_acc: ArrayLike,
    a_r_br: ArrayLike,
    a_f_br: ArrayLike,
) -> np.ndarray:
    """Minimum longitudinal gap with every parameter broadcast as an array [m]."""
    v_r = np.asarray(v_r, dtype=float)
    v_f = np.asarray(v_f, dtype=float)
    v_reacted = v_r + rho * a_r_acc
    d_min = (
        v_r * rho
        + 0.5 * a_r_acc * np.square(rho)
        + v_reacted**2 / (2.0 * a_r_br)
        - v_f**2 / (2.0 * a_f_br)
    )
    return np.maximum(d_min, 0.0)


def rss_lon_min_gap(v_f: ArrayLike, v_r: ArrayLike, rss: RssParameters) -> np.ndarray | float:
    """
    Minimum longitudinal gap between a rear and a front vehicle.

    The rear vehicle accelerates at ``a_r_acc`` during the reaction time and
    then brakes at ``a_r_br``; the front vehicle brakes at ``a_f_br``. A gap
    d is safe iff ``d > rss_lon_min_gap(...)``.

    Args:
        v_f: Front vehicle velocity [m/s]
        v_r: Rear vehicle velocity [m/s]
        rss: Model parameters

    Returns:
        Minimum gap [m], clamped below at 0
    """
    return _as_result(lon_min_gap(v_f, v_r, rss.rho, rss.a_r_acc, rss.a_r_br, rss.a_f_br))


def _lat_contribution(v: np.ndarray, rss: RssParameters) -> np.ndarray:
    rho = rss.lat_rho
    v_reacted = np.maximum(v + rho * rss.a_lat_acc, 0.0)
    worst = v * rho + 0.5 * rss.a_lat_acc * rho**2 + v_reacted**2 / (2.0 * rss.a_lat_br)
    return np.maximum(worst, 0.0)


def rss_lat_min_gap(
    v_toward_1: ArrayLike, v_toward_2: ArrayLike, rss: RssParameters
) -> np.ndarray | float:
    """
    Minimum lateral gap between two side-by-side agents.

    Each agent accelerates toward the other at ``a_lat_acc`` during
    ``lat_rho`` and then brakes laterally at ``a_lat_br``. A gap is safe
    iff it exceeds the returned value.

    Args:
        v_toward_1: Lateral velocity of agent 1 toward agent 2 [m/s] (negative = away)
        v_toward_2: Lateral velocity of agent 2 toward agent 1 [m/s]
        rss: Model parameters

    Returns:
        Minimum lateral gap [m] (at least ``mu_lat_margin``)
    """
    v1 = np.asarray(v_toward_1, dtype=float)
    v2 = np.asarray(v_toward_2, dtype=float)
    total = rss.mu_lat_margin + _lat_contribution(v1, rss) + _lat_contribution(v2, rss)
    return _as_result(total)


def simulate_lon_worst_case_gap(
    v_f: ArrayLike,
    v_r: ArrayLike,
    rho: ArrayLike,
    a_r_acc: ArrayLike,
    a_r_br: ArrayLike,
    a_f_br: ArrayLike,
    dt: float = SIMULATION_DT,
) -> np.ndarray:
    """
    Smallest initial gap that avoids contact in the longitudinal worst case.

    Steps both vehicles with exact constant-acceleration kinematics per
    step until both stand still and records the largest distance the rear
    vehicle closes in on the front one. Broadcasts over parameter grids.

    Returns:
        Boundary gap per parameter combination [m]
    """
    v_f, v_r, rho, a_r_acc, a_r_br, a_f_br = (
        np.array(a, dtype=float) for a in np.broadcast_arrays(v_f, v_r, rho, a_r_acc, a_r_br, a_f_br)
    )
    horizon = np.max(
        np.maximum(rho + (v_r + rho * a_r_acc) / a_r_br, v_f / a_f_br), initial=0.0
    )
    steps = int(math.ceil(horizon / dt)) + 1

    closing = np.zeros_like(v_f)
    worst = np.zeros_like(v_f)
    for k in range(steps):
        t0 = k * dt

        # Rear: accelerate for the rest of the reaction time, then brake.
        t_acc = np.clip(rho - t0, 0.0, dt)
        dx_r = v_r * t_acc + 0.5 * a_r_acc * t_acc**2
        v_r = v_r + a_r_acc * t_acc
        t_br = np.minimum(dt - t_acc, v_r / a_r_br)
        dx_r += v_r * t_br - 0.5 * a_r_br * t_br**2
        v_r = np.maximum(v_r - a_r_br * t_br, 0.0)

        # Front: brake until standstill.
        t_f = np.minimum(dt, v_f / a_f_br)
        dx_f = v_f * t_f - 0.5 * a_f_br * t_f**2
        v_f = np.maximum(v_f - a_f_br * t_f, 0.0)

        closing += dx_r - dx_f
        np.maximum(worst, closing, out=worst)
    return worst


def simulate_lat_worst_case_gap(
    v_toward_1: ArrayLike,
    v_toward_2: ArrayLike,
    rss: RssParameters,
    dt: float = SIMULATION_DT,
) -> np.ndarray:
    """
    Smallest lateral gap that avoids contact in the lateral worst case.

    Each agent's lateral motion is stepped separately (accelerate toward the
    other for the reaction time, then drive the lateral velocity to zero at
    the braking rate); the largest displacement of each is summed with the
    fluctuation margin.

    Returns:
        Boundary gap per velocity combination [m]
    """
    v1, v2 = (np.array(a, dtype=float) for a in np.broadcast_arrays(v_toward_1, v_toward_2))
    velocities = np.stack((v1, v2))
    reacted = np.abs(velocities) + rss.lat_rho * rss.a_lat_acc
    horizon = rss.lat_rho + np.max(reacted, initial=0.0) / rss.a_lat_br
    steps = int(math.ceil(horizon / dt)) + 1

    v = velocities.copy()
    displacement = np.zeros_like(v)
    worst = np.zeros_like(v)
    for k in range(steps):
        t0 = k * dt
        t_acc = min(max(rss.lat_rho - t0, 0.0), dt)
        dx = v * t_acc + 0.5 * rss.a_lat_acc * t_acc**2
        v = v + rss.a_lat_acc * t_acc

        t_br = np.minimum(dt - t_acc, np.abs(v) / rss.a_lat_br)
        direction = np.sign(v)
        dx += v * t_br - direction * 0.5 * rss.a_lat_br * t_br**2
        v = v - direction * rss.a_lat_br * t_br

        displacement += dx
        np.maximum(worst, displacement, out=worst)
    return rss.mu_lat_margin + worst.sum(axis=0)
