"""
Centralized supervisor settings using pydantic-settings.

All configuration values are loaded from environment variables
(prefix ``SUPERVISOR_``) with defaults suitable for desk replay.
"""

from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class SupervisorSettings(BaseSettings):
    """Process-wide configuration for the trajectory supervisor."""

    # Application
    app_name: str = "Trajectory Supervisor"
    app_version: str = "0.1.0"

    # Scenario lookup (SUPERVISOR_SCENARIO_PATH)
    scenario_path: str | None = None

    # Pose matching (trajectory must host a coordinate near the ego pose)
    pose_match_threshold: float = Field(default=1.0, gt=0)
    pose_match_window: int = Field(default=3, ge=1)

    # Geometry
    corridor_width: float = Field(default=50.0, gt=0)
    pose_reference: Literal["center", "rear_axle"] = "center"
    multi_lap_gaps: bool = False

    # Fallback behaviour
    reverify_stored_emergency: bool = False
    standstill_tolerance: float = Field(default=1e-6, ge=0)

    # Friction used when a scenario gives no value
    default_mu: float = Field(default=1.0, gt=0)

    # Envelope oracle
    envelope_dt: float = Field(default=0.01, gt=0)
    envelope_tail: float = Field(default=2.0, ge=0)

    # Batch replay
    batch_parallelism: int = Field(default=1, ge=1)

    # Logging
    log_level: str = "INFO"
    log_dir: str = ".logs"

    model_config = SettingsConfigDict(
        env_prefix="SUPERVISOR_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )


# Global settings instance
settings = SupervisorSettings()
