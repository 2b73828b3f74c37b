"""
Trajectory Supervisor - Report Writer Service

Writes run reports (text and JSON), the optional SVG score timeline and
batch summaries, and collects written run reports back into a summary.
"""

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from src.models.report import BatchEntry, BatchSummary, RunReport  # noqa: E402
from src.models.safety import CHECK_ORDER, MARGIN_SENTINEL  # noqa: E402
from src.models.scenario import SafetyEnvelope  # noqa: E402
from src.models.verdict import Verdict  # noqa: E402
from src.utils.helpers import format_float  # noqa: E402

logger = logging.getLogger(__name__)

REPORT_SUFFIX = "_report.json"

# Margins beyond this magnitude (vacuous checks, evaluation failures) are not drawn.
_PLOT_LIMIT = 1e6


def _margin_text(value: float) -> str:
    if value >= MARGIN_SENTINEL:
        return "vacuous"
    if value <= -MARGIN_SENTINEL:
        return "error"
    return f"{value:.4f}"


def format_report_text(report: RunReport) -> str:
    """Human-readable run report."""
    lines = [
        f"scenario: {report.scenario}",
        f"result: {'PASS' if report.passed else 'FAIL'} ({report.grade.reason})",
        f"expected: {report.expected}",
        f"frames: {report.frames} ({report.unsafe_frames} unsafe)",
        f"first fire: {'-' if report.first_fire is None else format_float(report.first_fire)}",
    ]
    if report.envelope is not None:
        lines.append(
            f"envelope: [{format_float(report.envelope.t_earliest)}, "
            f"{format_float(report.envelope.t_latest)}]"
        )
    lines.append(f"fired checks: {', '.join(report.fired_checks) or '-'}")
    lines.append("minimum margins:")
    lines.extend(f"  {name}: {_margin_text(value)}" for name, value in report.min_margins.items())
    latency = report.latency
    lines.append(
        f"latency [us]: median {latency.median_us:.1f}, p99 {latency.p99_us:.1f}, "
        f"max {latency.max_us:.1f} ({latency.samples} steps)"
    )
    return "\n".join(lines) + "\n"


def write_report_text(report: RunReport, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_report_text(report), encoding="utf-8")
    return path


def write_report_json(report: RunReport, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    return path


def load_report_json(path: str | Path) -> RunReport:
    """
    Read a run report written by ``write_report_json``.

    Raises:
        ValueError: If the file is not a valid run report
    """
    return RunReport.model_validate_json(Path(path).read_text(encoding="utf-8"))


def write_scores_svg(
    verdicts: list[Verdict],
    path: str | Path,
    title: str,
    envelope: SafetyEnvelope | None = None,
) -> Path:
    """
    Draw the score timeline: overall safety score and one margin trace per check.

    Args:
        verdicts: Replay verdicts
        path: Destination SVG path
        title: Figure title
        envelope: Safety envelope to shade, if any

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    t = np.array([v.t_abs for v in verdicts], dtype=float)

    plt.rcParams["svg.hashsalt"] = "trajectory-supervisor"
    fig, axes = plt.subplots(len(CHECK_ORDER) + 1, 1, sharex=True, figsize=(8, 12))
    try:
        axes[0].step(t, [1 if v.s_tot else 0 for v in verdicts], where="post", color="k")
        axes[0].set_ylabel("s_tot")
        axes[0].set_ylim(-0.1, 1.1)
        for ax, check_id in zip(axes[1:], CHECK_ORDER):
            margins = np.array([v.worst_margin(check_id) for v in verdicts], dtype=float)
            margins[np.abs(margins) >= _PLOT_LIMIT] = np.nan
            ax.plot(t, margins, color="tab:blue")
            ax.axhline(0.0, color="tab:red", linewidth=0.8)
            ax.set_ylabel(check_id.value)
        if envelope is not None and envelope.fires:
            for ax in axes:
                ax.axvspan(envelope.t_earliest, envelope.t_latest, color="tab:orange", alpha=0.2)
        axes[-1].set_xlabel("t_abs [s]")
        axes[0].set_title(title)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return path


def format_summary_text(summary: BatchSummary) -> str:
    """Human-readable batch summary."""
    lines = [f"{summary.passed}/{summary.total} passed"]
    for entry in summary.entries:
        if entry.report is not None:
            status = "PASS" if entry.passed else "FAIL"
            lines.append(f"{status} {entry.name}: {entry.report.grade.reason}")
        else:
            lines.append(f"ERROR {entry.name}: {entry.error}")
    if summary.failures:
        lines.append(f"failed: {', '.join(summary.failures)}")
    return "\n".join(lines) + "\n"


def write_batch_summary(summary: BatchSummary, out_dir: str | Path) -> tuple[Path, Path]:
    """
    Write ``summary.txt`` and ``summary.json``.

    Returns:
        Paths of the text and JSON summaries
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    text_path = out_dir / "summary.txt"
    json_path = out_dir / "summary.json"
    text_path.write_text(format_summary_text(summary), encoding="utf-8")
    json_path.write_text(summary.model_dump_json(indent=2), encoding="utf-8")
    return text_path, json_path


def collect_reports(directory: str | Path) -> BatchSummary:
    """
    Aggregate every ``*_report.json`` of a directory.

    Unreadable reports become error entries.

    Raises:
        FileNotFoundError: If the directory does not exist or holds no reports
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"Report directory not found: {directory}")
    paths = sorted(directory.glob(f"*{REPORT_SUFFIX}"))
    if not paths:
        raise FileNotFoundError(f"No run reports (*{REPORT_SUFFIX}) in {directory}")

    entries = []
    for path in paths:
        try:
            entries.append(BatchEntry(source=str(path), report=load_report_json(path)))
        except ValueError as e:
            logger.warning(f"Skipping unreadable report {path}: {e}")
            entries.append(BatchEntry(source=str(path), error=f"unreadable report: {e}"))
    entries.sort(key=lambda entry: entry.name)
    return BatchSummary(entries=tuple(entries))
