"""Trajectory Supervisor - runtime verification of planned vehicle trajectories."""

__version__ = "0.1.0"
