"""
Trajectory Supervisor - Batch Processing Service

Runs every scenario file of a directory and aggregates the run reports.
Scenarios replay independently, optionally in parallel worker processes;
one failing scenario never aborts the batch.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from src.models.report import BatchEntry, BatchSummary
from src.services.report_writer import write_batch_summary
from src.services.runner import run_scenario
from src.services.scenario_io import SCENARIO_SUFFIX, load_scenario

logger = logging.getLogger(__name__)


class BatchProcessorError(Exception):
    """
    Custom exception for batch processing errors.
    """

    def __init__(self, message: str) -> None:
        """
        Initialize batch processor error.

        Args:
            message: Error message describing what went wrong
        """
        self.message = message
        super().__init__(self.message)


def _run_one(
    path: str, out_dir: str, overrides: dict[str, str] | None, svg: bool
) -> BatchEntry:
    """Run one scenario file; operational errors become an error entry."""
    try:
        scenario = load_scenario(path, overrides)
        report = run_scenario(scenario, out_dir, svg)
    except Exception as e:
        logger.error(f"Scenario {path} could not be run: {e}")
        return BatchEntry(source=path, error=f"{type(e).__name__}: {e}")
    return BatchEntry(source=path, report=report)


class BatchProcessor:
    """
    Replays a directory of scenarios.

    Workflow:
    1. Collect ``*.scenario`` files of the directory
    2. Run each scenario (replay, grading, result files)
    3. Aggregate the reports, sorted by scenario name
    4. Write ``summary.txt`` and ``summary.json``
    """

    def __init__(
        self,
        output_dir: str | Path,
        parallelism: int = 1,
        overrides: dict[str, str] | None = None,
        svg: bool = False,
    ) -> None:
        """
        Initialize the batch processor.

        Args:
            output_dir: Directory receiving per-scenario results and the summary
            parallelism: Number of worker processes (1 runs in-process)
            overrides: Parameter overrides applied to every scenario
            svg: Also draw score timelines

        Raises:
            BatchProcessorError: If parallelism is not positive
        """
        if parallelism < 1:
            raise BatchProcessorError(f"Parallelism must be at least 1, got {parallelism}")
        self._output_dir = Path(output_dir)
        self._parallelism = parallelism
        self._overrides = overrides
        self._svg = svg

    @staticmethod
    def collect(directory: str | Path) -> list[Path]:
        """
        List the scenario files of a directory.

        Raises:
            BatchProcessorError: If the directory is missing or holds no scenarios
        """
        directory = Path(directory)
        if not directory.is_dir():
            raise BatchProcessorError(f"Scenario directory not found: {directory}")
        paths = sorted(directory.glob(f"*{SCENARIO_SUFFIX}"))
        if not paths:
            raise BatchProcessorError(f"No scenario files (*{SCENARIO_SUFFIX}) in {directory}")
        return paths

    def process_batch(self, directory: str | Path) -> BatchSummary:
        """
        Run every scenario of a directory.

        Args:
            directory: Directory of scenario files

        Returns:
            Batch summary

        Raises:
            BatchProcessorError: If there is nothing to run
        """
        paths = [str(p) for p in self.collect(directory)]
        out_dir = str(self._output_dir)
        logger.info(f"Running {len(paths)} scenarios from {directory} (parallelism {self._parallelism})")

        if self._parallelism == 1:
            entries = [_run_one(p, out_dir, self._overrides, self._svg) for p in paths]
        else:
            with ProcessPoolExecutor(max_workers=self._parallelism) as pool:
                futures = [
                    pool.submit(_run_one, p, out_dir, self._overrides, self._svg) for p in paths
                ]
                entries = [future.result() for future in futures]

        entries.sort(key=lambda entry: entry.name)
        summary = BatchSummary(entries=tuple(entries))
        write_batch_summary(summary, self._output_dir)
        logger.info(f"Batch finished: {summary.passed}/{summary.total} passed")
        return summary


def process_batch(
    directory: str | Path,
    output_dir: str | Path,
    parallelism: int = 1,
    overrides: dict[str, str] | None = None,
    svg: bool = False,
) -> BatchSummary:
    """
    Convenience function to run a directory of scenarios.

    Raises:
        BatchProcessorError: If there is nothing to run
    """
    processor = BatchProcessor(output_dir, parallelism=parallelism, overrides=overrides, svg=svg)
    return processor.process_batch(directory)
