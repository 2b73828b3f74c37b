"""
Trajectory Supervisor - Trajectory Validation Service

Checks planner output against the trajectory invariants. Violations are
returned as data (``<Name>@<index>``) so that malformed input is rated
unsafe instead of crashing the supervisor.
"""

import math

import numpy as np

from src.config.settings import settings
from src.models.trajectory import Trajectory, TrajectoryArrays, TrajectoryKind

MIN_POINTS = 2


class TrajectoryValidator:
    """
    Validates trajectories for correctness.

    Checks:
    - At least two points
    - Every field finite, t and v non-negative
    - Time strictly increasing
    - Emergency trajectories end at standstill
    """

    def __init__(self, standstill_tolerance: float | None = None) -> None:
        """
        Initialize the trajectory validator.

        Args:
            standstill_tolerance: Largest final velocity still counted as standstill [m/s]
        """
        self._standstill_tolerance = (
            settings.standstill_tolerance if standstill_tolerance is None else standstill_tolerance
        )

    def validate(self, trajectory: Trajectory, arrays: TrajectoryArrays | None = None) -> list[str]:
        """
        Validate a trajectory.

        Args:
            trajectory: Trajectory to validate
            arrays: Column view of the trajectory, when the caller already built it

        Returns:
            Violations in point order; empty iff the trajectory is valid
        """
        arrays = TrajectoryArrays.of(trajectory) if arrays is None else arrays
        violations: list[str] = []

        if len(trajectory) < MIN_POINTS:
            violations.append(f"TooFewPoints@{len(trajectory)}")

        violations.extend(self._validate_points(arrays))
        violations.extend(self._validate_time_order(arrays))

        if trajectory.kind == TrajectoryKind.EMERGENCY:
            violations.extend(self._validate_standstill(trajectory))

        return violations

    def _validate_points(self, arrays: TrajectoryArrays) -> list[str]:
        columns = (arrays.t, arrays.x, arrays.y, arrays.psi, arrays.kappa, arrays.v, arrays.ax)
        finite = np.logical_and.reduce([np.isfinite(column) for column in columns])
        negative_t = finite & (arrays.t < 0)
        negative_v = finite & (arrays.v < 0)
        violations: list[str] = []
        for i in np.flatnonzero(~finite | negative_t | negative_v):
            if not finite[i]:
                violations.append(f"NonFinite@{i}")
                continue
            if negative_t[i]:
                violations.append(f"NegativeTime@{i}")
            if negative_v[i]:
                violations.append(f"NegativeVelocity@{i}")
        return violations

    def _validate_time_order(self, arrays: TrajectoryArrays) -> list[str]:
        # NaN times compare as out of order
        out_of_order = ~(arrays.t[1:] > arrays.t[:-1])
        return [f"NonMonotoneTime@{i + 1}" for i in np.flatnonzero(out_of_order)]

    def _validate_standstill(self, trajectory: Trajectory) -> list[str]:
        if not trajectory.points:
            return []
        final_v = trajectory.points[-1].v
        if math.isfinite(final_v) and abs(final_v) > self._standstill_tolerance:
            return ["EmergencyNotStopping@last"]
        return []


def validate_trajectory(trajectory: Trajectory) -> list[str]:
    """
    Convenience function to validate a trajectory.

    Never raises; returns the list of violations.
    """
    return TrajectoryValidator().validate(trajectory)
