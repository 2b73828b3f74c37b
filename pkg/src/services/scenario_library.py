"""
Trajectory Supervisor - Scenario Library

Synthesises the shipped validation corpus: simple tracks, an all-safe
lap, traffic scenarios graded against the safety envelope and
fault-injected variants that target every single check.
"""

import logging
import math
from collections.abc import Callable
from pathlib import Path

import numpy as np

from src.models.safety import RuleSet
from src.models.scenario import Expectation, Scenario, ScenarioFrame
from src.models.track import TrackMap
from src.models.trajectory import Trajectory, TrajectoryKind
from src.models.vehicle import ObjectState, Pose, VehicleParameters
from src.models.verdict import PerceptionSnapshot
from src.services.fault_injector import build_fault, inject_fault
from src.services.scenario_io import SCENARIO_SUFFIX, write_scenario
from src.services.track_io import write_track_csv
from src.utils.helpers import ensure_directory, normalize_angle, safe_filename

logger = logging.getLogger(__name__)

FRAME_RATE = 10.0
HORIZON_POINTS = 50
POINT_DT = 0.1
LAP_RADIUS = 150.0
LAP_SPEED = 34.0
LAP_EMERGENCY_DECEL = 3.0


def race_car() -> VehicleParameters:
    """Ego vehicle used by the corpus."""
    return VehicleParameters(
        mass=800.0,
        length=4.7,
        width=2.0,
        reaction_time=0.5,
        a_brake_max=10.0,
        a_accel_engine=((0.0, 12.0), (30.0, 9.0), (60.0, 6.0), (90.0, 3.0)),
        turn_radius_min=10.0,
        rear_axle_offset=1.5,
    )


def straight_track(
    start: float = -200.0, end: float = 1200.0, half_width: float = 6.0, step: float = 5.0
) -> TrackMap:
    """Open straight track along +x, centered on y = 0."""
    x = np.arange(start, end + 0.5 * step, step)
    k = x.shape[0]
    return TrackMap(
        s=x - start,
        reference=np.column_stack((x, np.zeros(k))),
        width_left=np.full(k, half_width),
        width_right=np.full(k, half_width),
        closed=False,
        name="straight",
    )


def circular_track(radius: float = LAP_RADIUS, half_width: float = 5.0, samples: int = 720) -> TrackMap:
    """Closed counter-clockwise circle centered on the origin."""
    theta = 2.0 * math.pi * np.arange(samples) / samples
    reference = radius * np.column_stack((np.cos(theta), np.sin(theta)))
    chords = np.hypot(*np.diff(reference, axis=0).T)
    return TrackMap(
        s=np.concatenate(([0.0], np.cumsum(chords))),
        reference=reference,
        width_left=np.full(samples, half_width),
        width_right=np.full(samples, half_width),
        closed=True,
        name=f"circle_r{radius:g}",
    )


def _frame_times(duration: float) -> list[float]:
    return [k / FRAME_RATE for k in range(int(round(duration * FRAME_RATE)))]


def _braking_profile(v0: float, decel: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Time, travelled distance and velocity of a braking run ending exactly at standstill."""
    t_stop = v0 / decel
    tau = np.arange(int(math.floor(t_stop / POINT_DT)) + 1) * POINT_DT
    if t_stop - tau[-1] > 1e-9:
        tau = np.append(tau, t_stop)
    distance = v0 * tau - 0.5 * decel * tau**2
    v = np.maximum(v0 - decel * tau, 0.0)
    v[-1] = 0.0
    return tau, distance, v


def _straight_candidates(
    x0: float, y0: float, v: float, decel: float, drift: float = 0.0
) -> tuple[Trajectory, Trajectory]:
    """Constant-speed driving and braking emergency along +x; the emergency may drift sideways."""
    tau = np.arange(HORIZON_POINTS) * POINT_DT
    zeros = np.zeros_like(tau)
    driving = Trajectory.from_arrays(
        tau, x0 + v * tau, np.full_like(tau, y0), zeros, zeros, np.full_like(tau, v), zeros
    )

    tau_e, distance, v_e = _braking_profile(v, decel)
    heading = math.atan(drift)
    emergency = Trajectory.from_arrays(
        tau_e,
        x0 + distance * math.cos(heading),
        y0 + distance * math.sin(heading),
        np.full_like(tau_e, heading),
        np.zeros_like(tau_e),
        v_e,
        np.full_like(tau_e, -decel),
        kind=TrajectoryKind.EMERGENCY,
    )
    return driving, emergency


def _arc_trajectory(
    theta0: float, tau: np.ndarray, distance: np.ndarray, v: np.ndarray, ax: np.ndarray, kind: TrajectoryKind
) -> Trajectory:
    theta = theta0 + distance / LAP_RADIUS
    return Trajectory.from_arrays(
        tau,
        LAP_RADIUS * np.cos(theta),
        LAP_RADIUS * np.sin(theta),
        normalize_angle(theta + 0.5 * math.pi),
        np.full_like(tau, 1.0 / LAP_RADIUS),
        v,
        ax,
        kind=kind,
    )


def _scenario(
    name: str,
    description: str,
    track: TrackMap,
    frames: list[ScenarioFrame],
    expected: Expectation,
    rules: RuleSet | None = None,
) -> Scenario:
    return Scenario(
        name=name,
        description=description,
        track_path=f"{track.name}.csv",
        track=track,
        vehicle=race_car(),
        rules=rules or RuleSet(),
        frames=tuple(frames),
        expected=expected,
    )


def no_fire_lap(duration: float = 20.0) -> Scenario:
    """Feasible constant-speed run on the circle; no check may fire."""
    track = circular_track()
    frames = []
    for t in _frame_times(duration):
        theta0 = LAP_SPEED * t / LAP_RADIUS
        tau = np.arange(HORIZON_POINTS) * POINT_DT
        driving = _arc_trajectory(
            theta0, tau, LAP_SPEED * tau, np.full_like(tau, LAP_SPEED), np.zeros_like(tau), TrajectoryKind.DRIVING
        )
        tau_e, distance, v_e = _braking_profile(LAP_SPEED, LAP_EMERGENCY_DECEL)
        emergency = _arc_trajectory(
            theta0, tau_e, distance, v_e, np.full_like(tau_e, -LAP_EMERGENCY_DECEL), TrajectoryKind.EMERGENCY
        )
        first = driving.points[0]
        snapshot = PerceptionSnapshot(t_abs=t, ego_pose=Pose(x=first.x, y=first.y, psi=first.psi), mu=1.0)
        frames.append(ScenarioFrame(t_abs=t, snapshot=snapshot, driving=driving, emergency=emergency))
    return _scenario(
        "no_fire_lap",
        "Feasible lap at 34 m/s on a 150 m circle without traffic",
        track,
        frames,
        Expectation.no_fire(),
    )


def _cut_off_object(t: float) -> ObjectState:
    """Overtaking vehicle that cuts into the ego lane and brakes to a standstill."""
    brake_start, decel = 10.2, 10.0
    if t < brake_start:
        x, vx = -25.0 + 40.0 * t, 40.0
    else:
        tau = min(t - brake_start, 40.0 / decel)
        x, vx = 383.0 + 40.0 * tau - 0.5 * decel * tau**2, 40.0 - decel * tau

    if t < 3.0:
        y, vy = -0.9 + 0.5 * t, 0.5
    elif t < 5.0:
        y, vy = 0.6, 0.0
    elif t < 7.0:
        y, vy = 0.6 - 1.55 * (t - 5.0), -1.55
    else:
        y, vy = -2.5, 0.0
    return ObjectState(id="opponent", x=x, y=y, psi=math.atan2(vy, vx), v=math.hypot(vx, vy))


def cut_off(duration: float = 15.0) -> Scenario:
    """
    Opponent overtakes on the left, cuts into the ego lane and brakes hard.

    While the opponent closes in from behind the ego is ahead and exempt,
    so negative margins are rated safe; once the opponent stops ahead the
    supervisor must fire before braking can no longer avoid contact.
    """
    track = straight_track()
    frames = []
    for t in _frame_times(duration):
        driving, emergency = _straight_candidates(30.0 * t, -2.5, 30.0, 8.0)
        snapshot = PerceptionSnapshot(
            t_abs=t, ego_pose=Pose(x=30.0 * t, y=-2.5), objects=(_cut_off_object(t),), mu=1.0
        )
        frames.append(ScenarioFrame(t_abs=t, snapshot=snapshot, driving=driving, emergency=emergency))
    return _scenario(
        "cut_off",
        "Opponent overtakes, cuts in and brakes to a standstill ahead of the ego",
        track,
        frames,
        Expectation.fire_in_envelope(),
    )


def rear_responsibility(enabled: bool = True, duration: float = 2.0) -> Scenario:
    """
    Ego slightly ahead of an opponent in the neighbouring lane.

    Both margins are negative, but the opponent is responsible for the rear
    conflict; without the rule the ego must be rated unsafe.
    """
    track = straight_track()
    frames = []
    for t in _frame_times(duration):
        x_ego = 10.0 + 20.0 * t
        driving, emergency = _straight_candidates(x_ego, -1.05, 20.0, 8.0, drift=-0.05)
        opponent = ObjectState(id="opponent", x=4.0 + 20.0 * t, y=1.05, v=20.0)
        snapshot = PerceptionSnapshot(
            t_abs=t, ego_pose=Pose(x=x_ego, y=-1.05), objects=(opponent,), mu=1.0
        )
        frames.append(ScenarioFrame(t_abs=t, snapshot=snapshot, driving=driving, emergency=emergency))

    if enabled:
        return _scenario(
            "rear_responsibility",
            "Ego slightly ahead of an adjacent opponent; the opponent is responsible",
            track,
            frames,
            Expectation.no_fire(),
        )
    return _scenario(
        "rear_responsibility_disabled",
        "Same traffic with the rear-responsibility rule switched off",
        track,
        frames,
        Expectation.fire("r_lon"),
        rules=RuleSet(rear_responsibility_enabled=False),
    )


def distant_traffic(duration: float = 10.0) -> Scenario:
    """Opponent 500 m ahead in the ego lane at equal speed."""
    track = straight_track()
    frames = []
    for t in _frame_times(duration):
        driving, emergency = _straight_candidates(30.0 * t, -2.5, 30.0, 8.0)
        opponent = ObjectState(id="leader", x=500.0 + 30.0 * t, y=-2.5, v=30.0)
        snapshot = PerceptionSnapshot(
            t_abs=t, ego_pose=Pose(x=30.0 * t, y=-2.5), objects=(opponent,), mu=1.0
        )
        frames.append(ScenarioFrame(t_abs=t, snapshot=snapshot, driving=driving, emergency=emergency))
    return _scenario(
        "distant_traffic",
        "Leader 500 m ahead at equal speed",
        track,
        frames,
        Expectation.no_fire(),
    )


SPEED_LIMIT = 35.0


def speed_limited_lap(duration: float = 20.0) -> Scenario:
    """The all-safe lap under a speed limit just above its lap speed."""
    return no_fire_lap(duration).model_copy(update={"rules": RuleSet(v_max=SPEED_LIMIT)})


# Fault variants: (kind, parameters, scenario name, base scenario builder).
# Each variant trips its target check and no other.
FAULT_VARIANTS: tuple[tuple[str, dict[str, float], str, Callable[[float], Scenario]], ...] = (
    ("friction-exceed", {"scale": 1.3}, "friction_exceed", no_fire_lap),
    ("bound-collision", {"offset": 6.0}, "bound_collision", no_fire_lap),
    ("rule-violation", {"v_add": 2.0}, "rule_violation", speed_limited_lap),
    ("pose-offset", {"distance": 5.0}, "pose_mismatch", no_fire_lap),
    ("accel-spike", {"ax_add": 9.5}, "dynamic_limit_breach", distant_traffic),
    ("emergency-no-stop", {"v_final": 2.0}, "emergency_not_stopping", no_fire_lap),
)


def fault_variants(duration: float = 5.0) -> list[Scenario]:
    """One variant per fault kind, each expecting its target check to fire."""
    bases: dict[Callable[[float], Scenario], Scenario] = {}
    variants = []
    for kind, params, name, builder in FAULT_VARIANTS:
        if builder not in bases:
            bases[builder] = builder(duration)
        faulty = inject_fault(bases[builder], build_fault(kind, **params))
        variants.append(faulty.model_copy(update={"name": name}))
    return variants


BUILDERS: dict[str, Callable[[], Scenario]] = {
    "no_fire_lap": no_fire_lap,
    "cut_off": cut_off,
    "rear_responsibility": rear_responsibility,
    "rear_responsibility_disabled": lambda: rear_responsibility(enabled=False),
    "distant_traffic": distant_traffic,
}


def build_corpus() -> list[Scenario]:
    """All corpus scenarios, sorted by name."""
    scenarios = [builder() for builder in BUILDERS.values()] + fault_variants()
    return sorted(scenarios, key=lambda s: s.name)


def export_corpus(directory: str | Path) -> list[Path]:
    """
    Write the corpus as scenario files plus their track CSVs.

    Returns:
        Paths of the written scenario files
    """
    directory = ensure_directory(directory)
    tracks: dict[str, Path] = {}
    written = []
    for scenario in build_corpus():
        track_file = tracks.get(scenario.track.name)
        if track_file is None:
            track_file = write_track_csv(scenario.track, directory / f"{scenario.track.name}.csv")
            tracks[scenario.track.name] = track_file
        located = scenario.model_copy(update={"track_source": str(track_file)})
        written.append(
            write_scenario(located, directory / f"{safe_filename(scenario.name)}{SCENARIO_SUFFIX}")
        )
    logger.info(f"Exported {len(written)} scenarios to {directory}")
    return written
