"""
Trajectory models.

A trajectory is a time-ordered sequence of stamped vehicle states produced
by the planner. The models deliberately accept malformed data: checking the
trajectory invariants is the job of ``trajectory_validator`` so that bad
planner output is rated unsafe instead of failing at construction.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class TrajectoryKind(str, Enum):
    """
    Role of a trajectory candidate.

    Attributes:
        DRIVING: Nominal trajectory sent to the controller when safe
        EMERGENCY: Fallback trajectory that must end at standstill
    """

    DRIVING = "driving"
    EMERGENCY = "emergency"


class TrajectoryPoint(BaseModel):
    """
    One stamped state of a planned trajectory.

    Attributes:
        t: Time offset from trajectory start [s]
        x: Position x [m]
        y: Position y [m]
        psi: Heading [rad]
        kappa: Path curvature [1/m]
        v: Longitudinal velocity [m/s]
        ax: Longitudinal acceleration [m/s^2]
    """

    t: float
    x: float
    y: float
    psi: float = 0.0
    kappa: float = 0.0
    v: float = 0.0
    ax: float = 0.0

    model_config = ConfigDict(frozen=True)


class Trajectory(BaseModel):
    """
    Planned trajectory candidate under verification.

    Attributes:
        points: Ordered trajectory states
        kind: Driving or emergency candidate
    """

    points: tuple[TrajectoryPoint, ...] = Field(default_factory=tuple)
    kind: TrajectoryKind = TrajectoryKind.DRIVING

    model_config = ConfigDict(frozen=True)

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def from_arrays(
        cls,
        t: np.ndarray,
        x: np.ndarray,
        y: np.ndarray,
        psi: np.ndarray,
        kappa: np.ndarray,
        v: np.ndarray,
        ax: np.ndarray,
        kind: TrajectoryKind = TrajectoryKind.DRIVING,
    ) -> "Trajectory":
        """
        Build a trajectory from equally long per-field arrays.

        Raises:
            ValueError: If the arrays differ in length
        """
        columns = [np.asarray(c, dtype=float) for c in (t, x, y, psi, kappa, v, ax)]
        if len({c.shape[0] for c in columns}) != 1:
            raise ValueError("Trajectory field arrays must have equal length")

        points = tuple(
            TrajectoryPoint(t=r[0], x=r[1], y=r[2], psi=r[3], kappa=r[4], v=r[5], ax=r[6])
            for r in np.column_stack(columns).tolist()
        )
        return cls(points=points, kind=kind)


@dataclass(frozen=True)
class TrajectoryArrays:
    """Column view of a trajectory used by the vectorised checks."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    psi: np.ndarray
    kappa: np.ndarray
    v: np.ndarray
    ax: np.ndarray

    @classmethod
    def of(cls, trajectory: Trajectory) -> "TrajectoryArrays":
        table = np.array(
            [(p.t, p.x, p.y, p.psi, p.kappa, p.v, p.ax) for p in trajectory.points],
            dtype=float,
        ).reshape(-1, 7)
        return cls(*(np.ascontiguousarray(table[:, i]) for i in range(7)))

    def __len__(self) -> int:
        return int(self.t.shape[0])
