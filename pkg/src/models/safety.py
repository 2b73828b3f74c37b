"""
Safety-check models.

Holds the parameters of the worst-case (RSS) distance model, the active
rules of conduct and the per-check result record.
"""

import sys
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

# Largest representable margin, reported when a check is vacuously satisfied.
MARGIN_SENTINEL = sys.float_info.max


class CheckId(str, Enum):
    """
    Stable check identifiers (also the score-CSV column names).

    Attributes:
        S_STAT: Static collision against track bounds
        R_LON: Longitudinal RSS distance
        R_LAT: Lateral RSS distance
        POSE_MATCH: Trajectory hosts a coordinate near the ego pose
        A_COMB: Combined acceleration against the friction circle
        DYN_LIMITS: Curvature and acceleration against vehicle limits
        RULES: Rules of conduct
    """

    S_STAT = "s_stat"
    R_LON = "r_lon"
    R_LAT = "r_lat"
    POSE_MATCH = "pose_match"
    A_COMB = "a_comb"
    DYN_LIMITS = "dyn_limits"
    RULES = "rules"


# Grading-only identifier for trajectory input violations.
INPUT_VALID = "input_valid"

CHECK_ORDER: tuple[CheckId, ...] = tuple(CheckId)


class CheckResult(BaseModel):
    """
    Outcome of one safety check on one trajectory.

    ``safe`` equals ``margin >= 0`` for every check except ``r_lon`` and
    ``r_lat``, whose classification also depends on the other axis and on
    the rear-responsibility rule.

    Attributes:
        name: Check identifier
        margin: Signed margin, non-negative when satisfied (unit per check)
        safe: Boolean classification
        worst_index: Trajectory point index with the smallest margin
        detail: Free-text diagnostic
    """

    name: CheckId
    margin: float
    safe: bool
    worst_index: int | None = None
    detail: str | None = None

    model_config = ConfigDict(frozen=True)


class RssParameters(BaseModel):
    """
    Worst-case manoeuvre parameters of the responsibility-sensitive model.

    Attributes:
        rho: Longitudinal reaction time [s]
        a_r_acc: Maximum rear acceleration during the reaction time [m/s^2]
        a_r_br: Minimum assured rear braking (magnitude) [m/s^2]
        a_f_br: Maximum front braking (magnitude) [m/s^2]
        lat_rho: Lateral reaction time [s]
        a_lat_acc: Maximum lateral acceleration toward the other agent [m/s^2]
        a_lat_br: Minimum lateral braking (magnitude) [m/s^2]
        mu_lat_margin: Fixed lateral fluctuation margin [m]
    """

    rho: float = Field(default=0.5, ge=0)
    a_r_acc: float = Field(default=5.0, gt=0)
    a_r_br: float = Field(default=10.0, gt=0)
    a_f_br: float = Field(default=10.0, gt=0)
    lat_rho: float = Field(default=0.2, ge=0)
    a_lat_acc: float = Field(default=2.0, gt=0)
    a_lat_br: float = Field(default=4.0, gt=0)
    mu_lat_margin: float = Field(default=0.1, ge=0)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def validate_braking_order(self) -> "RssParameters":
        """The assured rear braking may not exceed the front's maximum braking."""
        if self.a_r_br > self.a_f_br:
            raise ValueError("a_r_br must not exceed a_f_br")
        return self


class RuleSet(BaseModel):
    """
    Rules of conduct formalised as scalar constraints.

    Attributes:
        v_max: Speed limit [m/s]; None disables the rule
        a_lon_max: Limit on |ax| [m/s^2]; None disables the rule
        rear_responsibility_enabled: Rear vehicle is responsible for collisions
    """

    v_max: float | None = Field(default=80.0, gt=0)
    a_lon_max: float | None = Field(default=None, gt=0)
    rear_responsibility_enabled: bool = True

    model_config = ConfigDict(frozen=True)
