"""
Trajectory Supervisor - Replay Service

Feeds scenario frames in order through one supervisor instance, measures
the per-step latency of the verification loop and writes the per-frame
score timeline.
"""

import csv
import io
import logging
import time
from dataclasses import dataclass
from pathlib import Path

from src.models.report import LatencyStats
from src.models.safety import CHECK_ORDER
from src.models.scenario import Scenario
from src.models.verdict import Verdict
from src.services.supervisor import Supervisor
from src.utils.helpers import format_float

logger = logging.getLogger(__name__)

SCORE_COLUMNS = ("t_abs", "s_tot") + tuple(c.value for c in CHECK_ORDER) + ("action",)


@dataclass(frozen=True)
class ReplayResult:
    """Verdicts of one replay and the per-step evaluation durations [ns]."""

    verdicts: list[Verdict]
    durations_ns: list[int]

    @property
    def latency(self) -> LatencyStats:
        return LatencyStats.from_nanoseconds(self.durations_ns)


def replay(scenario: Scenario) -> ReplayResult:
    """
    Replay a scenario through a freshly reset supervisor.

    Malformed frames are rated unsafe by the supervisor; a replay never
    aborts on bad input.

    Args:
        scenario: Validated scenario

    Returns:
        One verdict per frame plus latency samples
    """
    supervisor = Supervisor(
        scenario.track, scenario.vehicle, scenario.rss, scenario.rules, scenario.supervisor
    )
    supervisor.reset()

    verdicts: list[Verdict] = []
    durations: list[int] = []
    for frame in scenario.frames:
        start = time.perf_counter_ns()
        verdict = supervisor.evaluate_step(frame.snapshot, frame.driving, frame.emergency)
        durations.append(time.perf_counter_ns() - start)
        verdicts.append(verdict)

    unsafe = sum(1 for v in verdicts if not v.s_tot)
    logger.info(f"Replayed {scenario.name}: {len(verdicts)} frames, {unsafe} unsafe")
    return ReplayResult(verdicts=verdicts, durations_ns=durations)


def score_rows(verdicts: list[Verdict]) -> list[list[str]]:
    """Score table rows: worst margin of both candidates per check."""
    rows = []
    for verdict in verdicts:
        row = [format_float(verdict.t_abs), "1" if verdict.s_tot else "0"]
        row.extend(format_float(verdict.worst_margin(check_id)) for check_id in CHECK_ORDER)
        row.append(verdict.action.value)
        rows.append(row)
    return rows


def format_scores_csv(verdicts: list[Verdict]) -> str:
    """Locale-independent, byte-stable score CSV text."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SCORE_COLUMNS)
    writer.writerows(score_rows(verdicts))
    return buffer.getvalue()


def write_scores_csv(verdicts: list[Verdict], path: str | Path) -> Path:
    """
    Write the score timeline.

    Args:
        verdicts: Replay verdicts
        path: Destination path

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_scores_csv(verdicts), encoding="utf-8", newline="\n")
    return path
