"""
Logging configuration for the trajectory supervisor.

Sets up logging with both file and console handlers and quiets
third-party loggers that are chatty at INFO level.
"""

import logging
import sys
from pathlib import Path

from src.config.settings import settings


def setup_logging(level: str | None = None, log_dir: str | Path | None = None) -> None:
    """
    Configure logging for command-line runs.

    Args:
        level: Log level name (defaults to ``settings.log_level``)
        log_dir: Directory for ``supervisor.log`` (defaults to ``settings.log_dir``)
    """
    logs_dir = Path(log_dir or settings.log_dir)
    logs_dir.mkdir(parents=True, exist_ok=True)

    format_string = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    logging.basicConfig(
        level=getattr(logging, (level or settings.log_level).upper(), logging.INFO),
        format=format_string,
        handlers=[
            logging.FileHandler(logs_dir / "supervisor.log"),
            logging.StreamHandler(sys.stderr),
        ],
        force=True,
    )

    # Set specific log levels to reduce noise
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    logging.getLogger("shapely").setLevel(logging.WARNING)
