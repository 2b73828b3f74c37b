"""
Exit codes and operational error handling for the command-line front end.

Operational errors (bad input files, unusable parameters) are reported on
standard error without a traceback and map to exit code 2; graded
failures map to exit code 1.
"""

import logging
import sys

from src.services.batch_processor import BatchProcessorError
from src.services.envelope import EnvelopeNotApplicableError
from src.services.fault_injector import FaultInjectionError
from src.services.scenario_io import ScenarioParseError, ScenarioValidationError
from src.services.track_io import TrackFormatError

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_ERROR = 2

OPERATIONAL_ERRORS: tuple[type[Exception], ...] = (
    ScenarioParseError,
    ScenarioValidationError,
    TrackFormatError,
    FileNotFoundError,
    EnvelopeNotApplicableError,
    FaultInjectionError,
    BatchProcessorError,
)


def report_operational_error(exc: Exception) -> int:
    """
    Print a one-line diagnostic for an operational error.

    Returns:
        ``EXIT_ERROR``
    """
    logger.debug("Operational error", exc_info=exc)
    print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


def exit_code(passed: bool) -> int:
    return EXIT_PASS if passed else EXIT_FAIL
