"""
Supervisor input and output models.

Defines the perception snapshot fed to the supervisor every step, the
verdict it emits and the fallback state it carries between steps.
"""

from enum import Enum
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.config.settings import settings
from src.models.safety import CheckId, CheckResult
from src.models.trajectory import Trajectory
from src.models.vehicle import ObjectState, Pose

PositiveMu = Annotated[float, Field(gt=0)]


class Action(str, Enum):
    """
    Command forwarded to the controller.

    Attributes:
        EXECUTE_DRIVING: Both candidates are safe; drive the new trajectory
        EXECUTE_STORED_EMERGENCY: Fall back to the last emergency trajectory rated safe
        FULL_BRAKE_FAULT: No safe fallback exists; brake fully and report a fault
    """

    EXECUTE_DRIVING = "execute_driving"
    EXECUTE_STORED_EMERGENCY = "execute_stored_emergency"
    FULL_BRAKE_FAULT = "full_brake_fault"


class SupervisorConfig(BaseModel):
    """
    Per-run supervisor options.

    Defaults come from ``SupervisorSettings``; scenario headers and CLI
    overrides use the ``supervisor.*`` key space.
    """

    pose_threshold: float = Field(default_factory=lambda: settings.pose_match_threshold, gt=0)
    match_window: int = Field(default_factory=lambda: settings.pose_match_window, ge=1)
    corridor_width: float = Field(default_factory=lambda: settings.corridor_width, gt=0)
    pose_reference: Literal["center", "rear_axle"] = Field(
        default_factory=lambda: settings.pose_reference
    )
    reverify_stored_emergency: bool = Field(
        default_factory=lambda: settings.reverify_stored_emergency
    )
    multi_lap_gaps: bool = Field(default_factory=lambda: settings.multi_lap_gaps)

    model_config = ConfigDict(frozen=True)


class PerceptionSnapshot(BaseModel):
    """
    Perception data valid at one supervisor step.

    Attributes:
        t_abs: Absolute timestamp [s]
        ego_pose: Localised ego pose
        objects: Other traffic participants
        mu: Track-wide friction coefficient, or one value per trajectory point;
            a per-point list must match the length of every candidate it rates
    """

    t_abs: float
    ego_pose: Pose
    objects: tuple[ObjectState, ...] = Field(default_factory=tuple)
    mu: PositiveMu | tuple[PositiveMu, ...] = Field(default_factory=lambda: settings.default_mu)

    model_config = ConfigDict(frozen=True)

    @field_validator("mu")
    @classmethod
    def validate_mu_profile(cls, v: float | tuple[float, ...]) -> float | tuple[float, ...]:
        if isinstance(v, tuple) and not v:
            raise ValueError("Per-point friction needs at least one value")
        return v


class TrajectoryAssessment(BaseModel):
    """
    All check results for one trajectory candidate.

    Attributes:
        checks: One result per check, in ``CHECK_ORDER``
        violations: Input violations found by trajectory validation
        safe: True iff there are no violations and every check is safe
    """

    checks: tuple[CheckResult, ...]
    violations: tuple[str, ...] = Field(default_factory=tuple)
    safe: bool

    model_config = ConfigDict(frozen=True)

    def check(self, check_id: CheckId | str) -> CheckResult:
        """Look up the result of one check."""
        for result in self.checks:
            if result.name == check_id:
                return result
        raise KeyError(f"No result for check {check_id}")

    @property
    def failed_checks(self) -> list[str]:
        return [result.name.value for result in self.checks if not result.safe]


class Verdict(BaseModel):
    """
    Supervisor decision for one step.

    Attributes:
        t_abs: Timestamp of the snapshot [s]
        driving: Assessment of the driving candidate
        emergency: Assessment of the emergency candidate
        s_tot: Overall safety score (both candidates safe)
        action: Command forwarded to the controller
    """

    t_abs: float
    driving: TrajectoryAssessment
    emergency: TrajectoryAssessment
    s_tot: bool
    action: Action

    model_config = ConfigDict(frozen=True)

    @property
    def safe_driving(self) -> bool:
        return self.driving.safe

    @property
    def safe_emergency(self) -> bool:
        return self.emergency.safe

    def worst_margin(self, check_id: CheckId) -> float:
        """Smaller margin of the two candidates for one check."""
        return min(self.driving.check(check_id).margin, self.emergency.check(check_id).margin)

    def check_fired(self, check_id: CheckId) -> bool:
        """True if the check rated either candidate unsafe."""
        return not (self.driving.check(check_id).safe and self.emergency.check(check_id).safe)

    @property
    def has_input_violations(self) -> bool:
        return bool(self.driving.violations or self.emergency.violations)


class SupervisorState(BaseModel):
    """
    Fallback memory carried between supervisor steps.

    Attributes:
        stored_emergency: Last emergency trajectory rated safe at its own step
        last_t_abs: Timestamp of the last processed snapshot
    """

    stored_emergency: Trajectory | None = None
    last_t_abs: float | None = None

    model_config = ConfigDict(frozen=True)
