"""
Configuration module for the trajectory supervisor.

Provides centralized, environment-based configuration via pydantic-settings.
"""

from src.config.settings import SupervisorSettings, settings

__all__ = ["SupervisorSettings", "settings"]
