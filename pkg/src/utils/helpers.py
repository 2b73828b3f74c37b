"""
Utility helper functions for the trajectory supervisor.

Provides common utility functions used across the application.
"""

import math
import re
from pathlib import Path

import numpy as np


def ensure_directory(path: str | Path) -> Path:
    """
    Ensure a directory exists, creating it if necessary.

    Args:
        path: Path to the directory

    Returns:
        The directory as a Path
    """
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def safe_filename(filename: str) -> str:
    """
    Convert a scenario name to a safe file-name stem.

    Args:
        filename: Original name

    Returns:
        Safe file-name stem
    """
    safe = filename.replace("..", "")
    safe = re.sub(r'[\\/:*?"<>|]', "_", safe)
    safe = safe.replace(" ", "_")
    safe = re.sub(r"_+", "_", safe)
    return safe


def normalize_angle(angle: np.ndarray | float) -> np.ndarray | float:
    """
    Wrap angles into (-pi, pi].

    Args:
        angle: Angle(s) in radians

    Returns:
        Wrapped angle(s), same shape as the input
    """
    wrapped = np.pi - np.mod(np.pi - np.asarray(angle, dtype=float), 2.0 * np.pi)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def format_float(value: float) -> str:
    """
    Locale-independent, round-trip-exact float text.

    Integral values keep a trailing ``.0``; infinities are written as
    ``inf`` / ``-inf``.
    """
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def parse_key_value(text: str) -> tuple[str, str]:
    """
    Split a ``key=value`` assignment.

    Args:
        text: Assignment text

    Returns:
        Stripped (key, value) pair

    Raises:
        ValueError: If the text has no ``=`` or an empty key
    """
    key, sep, value = text.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ValueError(f"Expected key=value, got: {text!r}")
    return key, value.strip()


def parse_bool(text: str) -> bool:
    """
    Parse a boolean flag (``true/false``, ``yes/no``, ``on/off``, ``1/0``).

    Raises:
        ValueError: If the text is not a recognised boolean
    """
    lowered = text.strip().lower()
    if lowered in {"true", "yes", "on", "1"}:
        return True
    if lowered in {"false", "no", "off", "0"}:
        return False
    raise ValueError(f"Not a boolean: {text!r}")
