"""
Pytest configuration and shared fixtures.

Tracks, vehicle parameters and trajectory builders used across the unit
and integration tests.
"""

import math
from pathlib import Path

import numpy as np
import pytest

from src.models.safety import RssParameters, RuleSet
from src.models.scenario import Scenario
from src.models.track import TrackMap
from src.models.trajectory import Trajectory, TrajectoryKind
from src.models.vehicle import ObjectState, Pose, VehicleParameters
from src.models.verdict import PerceptionSnapshot, SupervisorConfig
from src.services.scenario_io import SCENARIO_SUFFIX, write_scenario
from src.services.scenario_library import circular_track, no_fire_lap, race_car, straight_track
from src.services.track_io import write_track_csv


@pytest.fixture(scope="session")
def straight() -> TrackMap:
    """Straight track along +x from -200 to 1200 m, 6 m to each bound."""
    return straight_track()


@pytest.fixture(scope="session")
def circle() -> TrackMap:
    """Closed counter-clockwise circle of radius 150 m, 5 m to each bound."""
    return circular_track()


@pytest.fixture
def vehicle() -> VehicleParameters:
    return race_car()


@pytest.fixture
def rss() -> RssParameters:
    return RssParameters()


@pytest.fixture
def rules() -> RuleSet:
    return RuleSet()


@pytest.fixture
def config() -> SupervisorConfig:
    return SupervisorConfig(pose_threshold=1.0, match_window=3, corridor_width=50.0)


def make_straight(
    x0: float = 0.0,
    y: float = 0.0,
    v: float = 20.0,
    ax: float = 0.0,
    kappa: float = 0.0,
    points: int = 20,
    dt: float = 0.1,
    kind: TrajectoryKind = TrajectoryKind.DRIVING,
) -> Trajectory:
    """Trajectory along +x with constant speed and acceleration field."""
    t = np.arange(points) * dt
    return Trajectory.from_arrays(
        t,
        x0 + v * t,
        np.full(points, y),
        np.zeros(points),
        np.full(points, kappa),
        np.full(points, v),
        np.full(points, ax),
        kind=kind,
    )


def make_braking(
    x0: float = 0.0, y: float = 0.0, v0: float = 20.0, decel: float = 8.0, dt: float = 0.1
) -> Trajectory:
    """Emergency trajectory along +x braking to an exact standstill."""
    t_stop = v0 / decel
    t = np.append(np.arange(int(math.floor(t_stop / dt - 1e-9)) + 1) * dt, t_stop)
    v = np.maximum(v0 - decel * t, 0.0)
    v[-1] = 0.0
    x = x0 + v0 * t - 0.5 * decel * t**2
    n = t.shape[0]
    return Trajectory.from_arrays(
        t, x, np.full(n, y), np.zeros(n), np.zeros(n), v, np.full(n, -decel),
        kind=TrajectoryKind.EMERGENCY,
    )


def make_snapshot(
    t_abs: float = 0.0,
    x: float = 0.0,
    y: float = 0.0,
    objects: tuple[ObjectState, ...] = (),
    mu: float | tuple[float, ...] = 1.0,
) -> PerceptionSnapshot:
    return PerceptionSnapshot(t_abs=t_abs, ego_pose=Pose(x=x, y=y), objects=objects, mu=mu)


@pytest.fixture
def straight_trajectory():
    """Factory for straight driving trajectories."""
    return make_straight


@pytest.fixture
def braking_trajectory():
    """Factory for straight emergency trajectories."""
    return make_braking


@pytest.fixture
def snapshot():
    """Factory for perception snapshots."""
    return make_snapshot


def write_scenario_files(directory: Path, *scenarios: Scenario) -> list[Path]:
    """Write scenarios and their track CSVs into a directory."""
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for scenario in scenarios:
        track_file = directory / f"{scenario.track.name}.csv"
        if not track_file.exists():
            write_track_csv(scenario.track, track_file)
        located = scenario.model_copy(update={"track_source": str(track_file)})
        paths.append(write_scenario(located, directory / f"{scenario.name}{SCENARIO_SUFFIX}"))
    return paths


@pytest.fixture
def short_lap() -> Scenario:
    """One-second clean lap."""
    return no_fire_lap(duration=1.0)
