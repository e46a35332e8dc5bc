"""
Command-line interface for KMBQKD.
"""

from .cli import cli, RunConfig

__all__ = [
    "cli",
    "RunConfig"
]
