"""
Vehicle and traffic participant models.

Defines the ego vehicle's physical parameters and the state of other
dynamic objects as reported by perception.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Gravitational acceleration [m/s^2]; no aerodynamic downforce is added.
GRAVITY = 9.81


class Pose(BaseModel):
    """Planar pose (x [m], y [m], psi [rad])."""

    x: float
    y: float
    psi: float = 0.0

    model_config = ConfigDict(frozen=True)


class VehicleParameters(BaseModel):
    """
    Physical limits of the ego vehicle.

    Attributes:
        mass: Vehicle mass [kg]
        length: Footprint length [m]
        width: Footprint width [m]
        reaction_time: Reaction time rho [s]
        a_brake_max: Maximum braking deceleration (magnitude) [m/s^2]
        a_accel_engine: Breakpoints (v [m/s], a [m/s^2]) of the engine acceleration limit
        turn_radius_min: Minimum turn radius [m]
        rear_axle_offset: Distance from geometric center back to the rear axle [m]
    """

    mass: float = Field(..., gt=0)
    length: float = Field(..., gt=0)
    width: float = Field(..., gt=0)
    reaction_time: float = Field(default=0.5, gt=0)
    a_brake_max: float = Field(..., gt=0)
    a_accel_engine: tuple[tuple[float, float], ...] = Field(..., min_length=1)
    turn_radius_min: float = Field(..., gt=0)
    rear_axle_offset: float = Field(default=1.5, ge=0)

    model_config = ConfigDict(frozen=True)

    @field_validator("a_accel_engine")
    @classmethod
    def validate_engine_curve(
        cls, v: tuple[tuple[float, float], ...]
    ) -> tuple[tuple[float, float], ...]:
        """
        Validate the engine acceleration curve.

        Breakpoints must start at v = 0, have strictly increasing velocity
        and non-negative acceleration.

        Raises:
            ValueError: If the curve is malformed
        """
        speeds = [bp[0] for bp in v]
        if speeds[0] != 0.0:
            raise ValueError("Engine curve must start at v = 0")
        if any(b <= a for a, b in zip(speeds, speeds[1:])):
            raise ValueError("Engine curve velocities must be strictly increasing")
        if any(bp[1] < 0 for bp in v):
            raise ValueError("Engine curve accelerations must be non-negative")
        return v

    @model_validator(mode="after")
    def validate_rear_axle(self) -> "VehicleParameters":
        if self.rear_axle_offset > self.length / 2:
            raise ValueError("rear_axle_offset must lie within the vehicle footprint")
        return self

    @property
    def normal_force(self) -> float:
        """Tire normal force F_N = m * g [N]."""
        return self.mass * GRAVITY

    @property
    def kappa_max(self) -> float:
        """Largest admissible absolute curvature [1/m]."""
        return 1.0 / self.turn_radius_min

    def engine_accel(self, v: np.ndarray | float) -> np.ndarray:
        """
        Maximum positive acceleration the drivetrain delivers at velocity v.

        Linear interpolation between breakpoints, clamped outside the range.
        """
        speeds = np.array([bp[0] for bp in self.a_accel_engine])
        accels = np.array([bp[1] for bp in self.a_accel_engine])
        return np.interp(v, speeds, accels)


class ObjectState(BaseModel):
    """
    Perceived state of another traffic participant.

    Attributes:
        id: Object identifier
        x: Position x [m]
        y: Position y [m]
        psi: Heading [rad]
        v: Speed along heading [m/s]
        length: Footprint length [m]
        width: Footprint width [m]
        a_brake_max: Maximum braking (magnitude) [m/s^2]; None uses the RSS default
        a_accel_max: Maximum acceleration [m/s^2]; None uses the RSS default
    """

    id: str = Field(..., min_length=1)
    x: float
    y: float
    psi: float = 0.0
    v: float = Field(default=0.0, ge=0)
    length: float = Field(default=4.7, gt=0)
    width: float = Field(default=2.0, gt=0)
    a_brake_max: float | None = Field(default=None, gt=0)
    a_accel_max: float | None = Field(default=None, gt=0)

    model_config = ConfigDict(frozen=True)

    @field_validator("id", mode="before")
    @classmethod
    def trim_id(cls, value: str) -> str:
        """Trim whitespace from the identifier."""
        return str(value).strip()

    def predict(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Constant-velocity position prediction at time offsets t."""
        t = np.asarray(t, dtype=float)
        return (
            self.x + self.v * np.cos(self.psi) * t,
            self.y + self.v * np.sin(self.psi) * t,
        )
