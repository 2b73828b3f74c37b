"""
Trajectory Supervisor - Scenario Runner

Runs one scenario end to end: replay, grading and result files.
"""

import logging
from pathlib import Path

from src.models.report import RunReport
from src.models.safety import CHECK_ORDER
from src.models.scenario import Scenario
from src.services.grading import first_fire, grade_scenario
from src.services.replay import replay, write_scores_csv
from src.services.report_writer import write_report_json, write_report_text, write_scores_svg
from src.utils.helpers import ensure_directory, safe_filename

logger = logging.getLogger(__name__)


def build_report(scenario: Scenario, out_dir: str | Path | None = None, svg: bool = False) -> RunReport:
    """
    Replay and grade a scenario, optionally writing its result files.

    Args:
        scenario: Validated scenario
        out_dir: Output directory; nothing is written when None
        svg: Also draw the score timeline

    Returns:
        Run report

    Raises:
        EnvelopeNotApplicableError: If the expectation cannot be graded
    """
    result = replay(scenario)
    verdicts = result.verdicts
    grade_result, envelope = grade_scenario(scenario, verdicts)

    score_csv = None
    if out_dir is not None:
        out_dir = ensure_directory(out_dir)
        stem = safe_filename(scenario.name)
        score_csv = str(write_scores_csv(verdicts, out_dir / f"{stem}_scores.csv"))
        if svg:
            write_scores_svg(verdicts, out_dir / f"{stem}_scores.svg", scenario.name, envelope)

    report = RunReport(
        scenario=scenario.name,
        expected=str(scenario.expected),
        frames=len(verdicts),
        unsafe_frames=sum(1 for v in verdicts if not v.s_tot),
        first_fire=first_fire(verdicts),
        fired_checks=tuple(c.value for c in CHECK_ORDER if any(v.check_fired(c) for v in verdicts)),
        min_margins={
            c.value: min((v.worst_margin(c) for v in verdicts), default=float("inf"))
            for c in CHECK_ORDER
        },
        envelope=envelope,
        grade=grade_result,
        latency=result.latency,
        score_csv=score_csv,
    )

    if out_dir is not None:
        write_report_text(report, out_dir / f"{stem}_report.txt")
        write_report_json(report, out_dir / f"{stem}_report.json")
        logger.info(f"Wrote results of {scenario.name} to {out_dir}")
    return report


def run_scenario(scenario: Scenario, out_dir: str | Path, svg: bool = False) -> RunReport:
    """Replay, grade and write ``<name>_scores.csv`` and ``<name>_report.{txt,json}``."""
    return build_report(scenario, out_dir, svg)
