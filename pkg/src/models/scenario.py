"""
Scenario models.

A scenario is an open-loop replay input: a track, the vehicle and rule
parameters, a sequence of frames and the expected supervisor behaviour.
"""

import math
from enum import Enum
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.models.safety import INPUT_VALID, CheckId, RssParameters, RuleSet
from src.models.track import TrackMap
from src.models.trajectory import Trajectory
from src.models.verdict import PerceptionSnapshot, SupervisorConfig
from src.models.vehicle import VehicleParameters


class ExpectationKind(str, Enum):
    """
    Ground-truth behaviour expected from the supervisor.

    Attributes:
        NO_FIRE: No frame may be rated unsafe
        FIRE_IN_ENVELOPE: First fire must fall within the safety envelope
        FIRE_SPECIFIC_CHECK: The named check must fire where its oracle says so
    """

    NO_FIRE = "no-fire"
    FIRE_IN_ENVELOPE = "fire-in-envelope"
    FIRE_SPECIFIC_CHECK = "fire"


class Expectation(BaseModel):
    """Expected behaviour, written as ``no-fire``, ``fire-in-envelope`` or ``fire:<check>``."""

    kind: ExpectationKind
    check: str | None = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def validate_check(self) -> "Expectation":
        if self.kind == ExpectationKind.FIRE_SPECIFIC_CHECK:
            valid = {c.value for c in CheckId} | {INPUT_VALID}
            if self.check not in valid:
                raise ValueError(f"Unknown check id in expectation: {self.check!r}")
        elif self.check is not None:
            raise ValueError(f"Expectation '{self.kind.value}' takes no check id")
        return self

    @classmethod
    def parse(cls, text: str) -> "Expectation":
        """
        Parse the textual form.

        Raises:
            ValueError: If the text is not a known expectation
        """
        text = text.strip()
        if text.startswith("fire:"):
            return cls(kind=ExpectationKind.FIRE_SPECIFIC_CHECK, check=text[len("fire:"):].strip())
        return cls(kind=ExpectationKind(text))

    def __str__(self) -> str:
        if self.kind == ExpectationKind.FIRE_SPECIFIC_CHECK:
            return f"fire:{self.check}"
        return self.kind.value

    @classmethod
    def no_fire(cls) -> "Expectation":
        return cls(kind=ExpectationKind.NO_FIRE)

    @classmethod
    def fire_in_envelope(cls) -> "Expectation":
        return cls(kind=ExpectationKind.FIRE_IN_ENVELOPE)

    @classmethod
    def fire(cls, check: CheckId | str) -> "Expectation":
        check_id = check.value if isinstance(check, CheckId) else check
        return cls(kind=ExpectationKind.FIRE_SPECIFIC_CHECK, check=check_id)


class SafetyEnvelope(BaseModel):
    """
    Interval in which the supervisor is allowed to fire first.

    Attributes:
        t_earliest: Allowed earliest detection time [s]
        t_latest: Required latest detection time [s]; +inf if no collision follows
    """

    t_earliest: float
    t_latest: float

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    @model_validator(mode="after")
    def validate_order(self) -> "SafetyEnvelope":
        if self.t_earliest > self.t_latest:
            raise ValueError("t_earliest must not exceed t_latest")
        return self

    @property
    def fires(self) -> bool:
        """True if a collision follows, i.e. the supervisor must fire."""
        return math.isfinite(self.t_latest)


class ScenarioFrame(BaseModel):
    """
    One timestamp of replay input.

    Attributes:
        t_abs: Absolute timestamp [s]
        snapshot: Perception data of the frame
        driving: Driving trajectory candidate
        emergency: Emergency trajectory candidate
    """

    t_abs: float
    snapshot: PerceptionSnapshot
    driving: Trajectory
    emergency: Trajectory

    model_config = ConfigDict(frozen=True)


class Scenario(BaseModel):
    """
    Replayable validation scenario.

    Attributes:
        name: Scenario name (used for output file names)
        description: Optional free text
        track_path: Track CSV path as written in the scenario header
        track_source: Resolved track file the scenario was loaded with
        track: Resolved track map
        vehicle: Ego vehicle parameters
        rss: Worst-case distance model parameters
        rules: Rules of conduct
        supervisor: Supervisor options
        frames: Ordered replay frames
        expected: Expected supervisor behaviour
        envelope: Manually authored safety envelope (overrides the oracle)
    """

    name: str = Field(..., min_length=1)
    description: str | None = None
    track_path: str
    track_source: str | None = None
    track: TrackMap
    vehicle: VehicleParameters
    rss: RssParameters = Field(default_factory=RssParameters)
    rules: RuleSet = Field(default_factory=RuleSet)
    supervisor: SupervisorConfig = Field(default_factory=SupervisorConfig)
    frames: tuple[ScenarioFrame, ...]
    expected: Expectation = Field(default_factory=Expectation.no_fire)
    envelope: SafetyEnvelope | None = None

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @property
    def frame_times(self) -> list[float]:
        return [frame.t_abs for frame in self.frames]

    @property
    def has_objects(self) -> bool:
        return any(frame.snapshot.objects for frame in self.frames)


class _FaultBase(BaseModel):
    model_config = ConfigDict(frozen=True)

    @property
    def is_identity(self) -> bool:
        raise NotImplementedError

    @property
    def target_check(self) -> str:
        raise NotImplementedError


class FrictionExceed(_FaultBase):
    """Scale every trajectory velocity (curvature fixed)."""

    kind: Literal["friction-exceed"] = "friction-exceed"
    scale: float = Field(..., gt=0)

    @property
    def is_identity(self) -> bool:
        return self.scale == 1.0

    @property
    def target_check(self) -> str:
        return CheckId.A_COMB.value


class BoundCollision(_FaultBase):
    """Shift both trajectories and the ego pose along the track normal (left positive)."""

    kind: Literal["bound-collision"] = "bound-collision"
    offset: float

    @property
    def is_identity(self) -> bool:
        return self.offset == 0.0

    @property
    def target_check(self) -> str:
        return CheckId.S_STAT.value


class RuleViolation(_FaultBase):
    """Add a constant to every driving trajectory velocity."""

    kind: Literal["rule-violation"] = "rule-violation"
    v_add: float

    @property
    def is_identity(self) -> bool:
        return self.v_add == 0.0

    @property
    def target_check(self) -> str:
        return CheckId.RULES.value


class PoseOffset(_FaultBase):
    """Displace the localised ego pose sideways away from the trajectories."""

    kind: Literal["pose-offset"] = "pose-offset"
    distance: float

    @property
    def is_identity(self) -> bool:
        return self.distance == 0.0

    @property
    def target_check(self) -> str:
        return CheckId.POSE_MATCH.value


class AccelSpike(_FaultBase):
    """Add a constant to the longitudinal acceleration of driving trajectories."""

    kind: Literal["accel-spike"] = "accel-spike"
    ax_add: float

    @property
    def is_identity(self) -> bool:
        return self.ax_add == 0.0

    @property
    def target_check(self) -> str:
        return CheckId.DYN_LIMITS.value


class EmergencyNoStop(_FaultBase):
    """Raise the final velocity of every emergency trajectory."""

    kind: Literal["emergency-no-stop"] = "emergency-no-stop"
    v_final: float = Field(..., ge=0)

    @property
    def is_identity(self) -> bool:
        return self.v_final == 0.0

    @property
    def target_check(self) -> str:
        return INPUT_VALID


Fault = Annotated[
    Union[FrictionExceed, BoundCollision, RuleViolation, PoseOffset, AccelSpike, EmergencyNoStop],
    Field(discriminator="kind"),
]
