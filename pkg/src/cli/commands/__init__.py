"""
Command modules of the supervisor CLI.
"""

from src.cli.commands import batch, corpus, inject, report, run

COMMANDS = (run, batch, inject, report, corpus)

__all__ = ["COMMANDS"]
