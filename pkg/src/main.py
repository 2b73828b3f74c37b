"""
Trajectory Supervisor - entry point.

Thin wrapper around the command-line application in ``src/cli``.
"""

import sys

from src.cli import main

__all__ = ["main"]


if __name__ == "__main__":
    sys.exit(main())
