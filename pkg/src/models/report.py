"""
Replay and grading result models.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.models.scenario import SafetyEnvelope


class GradeResult(BaseModel):
    """
    Outcome of grading one replay against its expectation.

    Attributes:
        passed: True if the supervisor behaved as expected
        reason: Short explanation (``ok``, ``premature``, ``missed``, ...)
        fire_time: Timestamp of the first unsafe frame, if any
    """

    passed: bool
    reason: str
    fire_time: float | None = None

    model_config = ConfigDict(frozen=True)


class LatencyStats(BaseModel):
    """Per-step evaluation latency summary [µs]."""

    samples: int = Field(..., ge=0)
    median_us: float
    p99_us: float
    max_us: float

    model_config = ConfigDict(frozen=True)

    @classmethod
    def from_nanoseconds(cls, durations_ns: list[int]) -> "LatencyStats":
        if not durations_ns:
            return cls(samples=0, median_us=0.0, p99_us=0.0, max_us=0.0)
        us = np.asarray(durations_ns, dtype=float) / 1e3
        return cls(
            samples=int(us.size),
            median_us=float(np.median(us)),
            p99_us=float(np.percentile(us, 99)),
            max_us=float(us.max()),
        )


class RunReport(BaseModel):
    """
    Summary of one scenario replay.

    Attributes:
        scenario: Scenario name
        expected: Expectation in textual form
        frames: Number of replayed frames
        unsafe_frames: Number of frames with s_tot = false
        first_fire: Timestamp of the first unsafe frame
        fired_checks: Checks that rated any candidate unsafe, in check order
        min_margins: Smallest margin per check over the whole replay
        envelope: Safety envelope used for grading, if any
        grade: Grading outcome
        latency: Per-step latency summary
        score_csv: Path of the written score table
    """

    scenario: str
    expected: str
    frames: int
    unsafe_frames: int
    first_fire: float | None = None
    fired_checks: tuple[str, ...] = Field(default_factory=tuple)
    min_margins: dict[str, float] = Field(default_factory=dict)
    envelope: SafetyEnvelope | None = None
    grade: GradeResult
    latency: LatencyStats
    score_csv: str | None = None

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    @property
    def passed(self) -> bool:
        return self.grade.passed


class BatchEntry(BaseModel):
    """
    Result of one scenario in a batch.

    Attributes:
        source: Scenario file
        report: Run report, None if the scenario could not be run
        error: Operational error text
    """

    source: str
    report: RunReport | None = None
    error: str | None = None

    model_config = ConfigDict(frozen=True)

    @property
    def name(self) -> str:
        return self.report.scenario if self.report else self.source

    @property
    def passed(self) -> bool:
        return self.report is not None and self.report.passed


class BatchSummary(BaseModel):
    """Aggregate of a batch run, entries sorted by scenario name."""

    entries: tuple[BatchEntry, ...]

    model_config = ConfigDict(frozen=True)

    @property
    def total(self) -> int:
        return len(self.entries)

    @property
    def passed(self) -> int:
        return sum(1 for entry in self.entries if entry.passed)

    @property
    def failures(self) -> list[str]:
        return [entry.name for entry in self.entries if not entry.passed]

    @property
    def all_passed(self) -> bool:
        return self.total > 0 and self.passed == self.total
