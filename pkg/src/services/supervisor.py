"""
Trajectory Supervisor - Supervisor Core Service

Aggregates all safety checks into a verdict per step and runs the
emergency-trajectory fallback state machine:

- both candidates safe: execute the driving trajectory, store the emergency one
- otherwise, with a stored emergency trajectory: execute the stored one
- otherwise: full brake and report a fault
"""

import logging
from collections.abc import Callable

import numpy as np

from src.models.safety import (
    CHECK_ORDER,
    MARGIN_SENTINEL,
    CheckId,
    CheckResult,
    RssParameters,
    RuleSet,
)
from src.models.track import TrackMap
from src.models.trajectory import Trajectory, TrajectoryArrays, TrajectoryKind
from src.models.vehicle import VehicleParameters
from src.models.verdict import (
    Action,
    PerceptionSnapshot,
    SupervisorConfig,
    SupervisorState,
    TrajectoryAssessment,
    Verdict,
)
from src.services.frenet import project_points
from src.services.safety_checks import (
    check_dynamic_limits,
    check_dynamic_objects,
    check_friction,
    check_pose_match,
    check_rules,
    check_static_collision,
)
from src.services.trajectory_validator import TrajectoryValidator

logger = logging.getLogger(__name__)


class InvalidInputError(Exception):
    """
    Supervisor input that violates the interface contract.

    Never raised out of ``evaluate_step``; the violations are carried on
    the verdict and rate the affected candidate unsafe.
    """

    def __init__(self, message: str, violations: list[str]) -> None:
        """
        Initialize invalid input error.

        Args:
            message: Overall error message
            violations: Individual violation strings
        """
        self.message = message
        self.violations = violations
        super().__init__(self.message)


def _check_input(
    trajectory: Trajectory, arrays: TrajectoryArrays, extra_violations: tuple[str, ...]
) -> None:
    """
    Validate one candidate against the input contract.

    Raises:
        InvalidInputError: If the trajectory or the step violates the contract
    """
    violations = TrajectoryValidator().validate(trajectory, arrays) + list(extra_violations)
    if violations:
        raise InvalidInputError(
            f"{trajectory.kind.value} trajectory violates the input contract", violations
        )


def _failed(check_id: CheckId, error: Exception) -> CheckResult:
    return CheckResult(
        name=check_id,
        margin=-MARGIN_SENTINEL,
        safe=False,
        detail=f"{type(error).__name__}: {error}",
    )


def _guarded(check_id: CheckId, check: Callable[[], CheckResult]) -> CheckResult:
    try:
        return check()
    except Exception as e:
        logger.warning(f"Check {check_id.value} failed to evaluate: {e}")
        return _failed(check_id, e)


def _friction_values(
    arrays: TrajectoryArrays, snapshot: PerceptionSnapshot, track: TrackMap, config: SupervisorConfig
) -> np.ndarray | float:
    """Per-point friction from the track profile, else the snapshot value(s)."""
    if track.mu is None:
        return np.asarray(snapshot.mu, dtype=float)
    frenet = project_points(np.column_stack((arrays.x, arrays.y)), track, config.corridor_width)
    return track.mu_at(frenet.s)


def assess_trajectory(
    trajectory: Trajectory,
    snapshot: PerceptionSnapshot,
    track: TrackMap,
    params: VehicleParameters,
    rss: RssParameters,
    rules: RuleSet,
    config: SupervisorConfig,
    extra_violations: tuple[str, ...] = (),
) -> TrajectoryAssessment:
    """
    Run every check on one candidate.

    Args:
        trajectory: Candidate trajectory
        snapshot: Perception data of the step
        track: Track map
        params: Ego vehicle parameters
        rss: Worst-case distance parameters
        rules: Rules of conduct
        config: Supervisor options
        extra_violations: Step-level violations (e.g. snapshot ordering)

    Returns:
        Check results in check order plus input violations
    """
    arrays = TrajectoryArrays.of(trajectory)
    violations: tuple[str, ...] = ()
    try:
        _check_input(trajectory, arrays, extra_violations)
    except InvalidInputError as e:
        logger.warning(f"t={snapshot.t_abs}: {e.message}: {', '.join(e.violations)}")
        violations = tuple(e.violations)

    results: dict[CheckId, CheckResult] = {
        CheckId.S_STAT: _guarded(
            CheckId.S_STAT,
            lambda: check_static_collision(
                trajectory, track, params, config.pose_reference, arrays=arrays
            ),
        ),
        CheckId.POSE_MATCH: _guarded(
            CheckId.POSE_MATCH,
            lambda: check_pose_match(
                trajectory, snapshot.ego_pose, config.pose_threshold, config.match_window
            ),
        ),
        CheckId.A_COMB: _guarded(
            CheckId.A_COMB,
            lambda: check_friction(
                trajectory, _friction_values(arrays, snapshot, track, config), params, arrays=arrays
            ),
        ),
        CheckId.DYN_LIMITS: _guarded(
            CheckId.DYN_LIMITS, lambda: check_dynamic_limits(trajectory, params, arrays=arrays)
        ),
        CheckId.RULES: _guarded(CheckId.RULES, lambda: check_rules(trajectory, rules, arrays=arrays)),
    }
    try:
        r_lon, r_lat = check_dynamic_objects(
            trajectory,
            snapshot.objects,
            track,
            params,
            rss,
            rules,
            pose_reference=config.pose_reference,
            corridor_width=config.corridor_width,
            multi_lap_gaps=config.multi_lap_gaps,
            arrays=arrays,
        )
    except Exception as e:
        logger.warning(f"Dynamic object check failed to evaluate: {e}")
        r_lon, r_lat = _failed(CheckId.R_LON, e), _failed(CheckId.R_LAT, e)
    results[CheckId.R_LON] = r_lon
    results[CheckId.R_LAT] = r_lat

    checks = tuple(results[check_id] for check_id in CHECK_ORDER)
    safe = not violations and all(result.safe for result in checks)
    return TrajectoryAssessment(checks=checks, violations=violations, safe=safe)


def evaluate_step(
    state: SupervisorState,
    snapshot: PerceptionSnapshot,
    driving: Trajectory,
    emergency: Trajectory,
    track: TrackMap,
    params: VehicleParameters,
    rss: RssParameters,
    rules: RuleSet,
    config: SupervisorConfig | None = None,
) -> tuple[Verdict, SupervisorState]:
    """
    Verify both trajectory candidates of one step and select the action.

    Never raises: malformed input and failing checks rate the affected
    candidate unsafe.

    Args:
        state: Fallback state from the previous step
        snapshot: Perception data of this step
        driving: Driving trajectory candidate
        emergency: Emergency trajectory candidate
        track: Track map
        params: Ego vehicle parameters
        rss: Worst-case distance parameters
        rules: Rules of conduct
        config: Supervisor options (defaults from settings)

    Returns:
        Verdict of the step and the successor state
    """
    config = config or SupervisorConfig()

    step_violations: tuple[str, ...] = ()
    if state.last_t_abs is not None and not snapshot.t_abs > state.last_t_abs:
        step_violations = (f"NonMonotoneSnapshot@{snapshot.t_abs}",)

    if driving.kind != TrajectoryKind.DRIVING:
        driving = driving.model_copy(update={"kind": TrajectoryKind.DRIVING})
    if emergency.kind != TrajectoryKind.EMERGENCY:
        emergency = emergency.model_copy(update={"kind": TrajectoryKind.EMERGENCY})

    driving_assessment = assess_trajectory(
        driving, snapshot, track, params, rss, rules, config, step_violations
    )
    emergency_assessment = assess_trajectory(
        emergency, snapshot, track, params, rss, rules, config, step_violations
    )
    s_tot = driving_assessment.safe and emergency_assessment.safe

    stored = state.stored_emergency
    if s_tot:
        action = Action.EXECUTE_DRIVING
        stored = emergency
    elif stored is not None:
        action = Action.EXECUTE_STORED_EMERGENCY
        if config.reverify_stored_emergency:
            recheck = assess_trajectory(stored, snapshot, track, params, rss, rules, config)
            if not recheck.safe:
                logger.error(
                    f"t={snapshot.t_abs}: stored emergency trajectory failed re-verification "
                    f"({', '.join(recheck.failed_checks) or 'input violations'})"
                )
                action = Action.FULL_BRAKE_FAULT
                stored = None
    else:
        action = Action.FULL_BRAKE_FAULT

    if not s_tot:
        failed = sorted(
            set(driving_assessment.failed_checks) | set(emergency_assessment.failed_checks)
        )
        message = (
            f"t={snapshot.t_abs}: unsafe (failed: {', '.join(failed) or 'input violations'}), "
            f"action {action.value}"
        )
        if action == Action.FULL_BRAKE_FAULT:
            logger.error(message)
        else:
            logger.warning(message)

    verdict = Verdict(
        t_abs=snapshot.t_abs,
        driving=driving_assessment,
        emergency=emergency_assessment,
        s_tot=s_tot,
        action=action,
    )
    return verdict, SupervisorState(stored_emergency=stored, last_t_abs=snapshot.t_abs)


def reset(state: SupervisorState | None = None) -> SupervisorState:
    """Empty fallback state (no stored emergency trajectory, no timestamp)."""
    return SupervisorState()


class Supervisor:
    """
    Stateful supervisor for one vehicle.

    Single writer: owns its ``SupervisorState`` and advances it with every
    ``evaluate_step`` call. Independent instances may run in parallel.
    """

    def __init__(
        self,
        track: TrackMap,
        params: VehicleParameters,
        rss: RssParameters | None = None,
        rules: RuleSet | None = None,
        config: SupervisorConfig | None = None,
    ) -> None:
        """
        Initialize the supervisor.

        Args:
            track: Track map
            params: Ego vehicle parameters
            rss: Worst-case distance parameters (defaults if None)
            rules: Rules of conduct (defaults if None)
            config: Supervisor options (defaults from settings if None)
        """
        self._track = track
        self._params = params
        self._rss = rss or RssParameters()
        self._rules = rules or RuleSet()
        self._config = config or SupervisorConfig()
        self._state = SupervisorState()

    @property
    def state(self) -> SupervisorState:
        return self._state

    def reset(self) -> None:
        self._state = reset(self._state)

    def evaluate_step(
        self, snapshot: PerceptionSnapshot, driving: Trajectory, emergency: Trajectory
    ) -> Verdict:
        """Verify one step and advance the fallback state."""
        verdict, self._state = evaluate_step(
            self._state,
            snapshot,
            driving,
            emergency,
            self._track,
            self._params,
            self._rss,
            self._rules,
            self._config,
        )
        return verdict
