"""
Logging for the KMB09 toolkit.

Reports are printed on stdout by the CLI, so every log line goes to stderr
(and optionally to ``logs/<app_name>.log``).
"""
import logging
import sys
from typing import Optional

from config.settings import settings
from .exceptions import ConfigurationError

CONSOLE_FORMAT = "%(levelname)s %(name)s: %(message)s"
FILE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def resolve_level(name: str) -> int:
    """Map a level name such as ``"info"`` to its logging constant."""
    level = logging.getLevelName(name.upper())
    if not isinstance(level, int):
        raise ConfigurationError(f"Unknown log level: {name}")
    return level


class Logger:
    """Process-wide logger configured from settings."""

    _instance: Optional['Logger'] = None
    _logger: Optional[logging.Logger] = None

    def __new__(cls) -> 'Logger':
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if self._logger is None:
            self._setup_logger()

    def _setup_logger(self) -> None:
        self._logger = logging.getLogger(settings.app_name)
        self._logger.setLevel(resolve_level(settings.log_level))
        self._logger.propagate = False
        self._logger.handlers.clear()

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(logging.Formatter(CONSOLE_FORMAT))
        self._logger.addHandler(console_handler)

        if settings.log_to_file:
            settings.logs_dir.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(settings.logs_dir / f"{settings.app_name.lower()}.log")
            file_handler.setFormatter(logging.Formatter(FILE_FORMAT))
            self._logger.addHandler(file_handler)

    @property
    def logger(self) -> logging.Logger:
        return self._logger

    def set_level(self, level: str) -> None:
        """Change the level at runtime, e.g. for ``--verbose``."""
        self._logger.setLevel(resolve_level(level))

    def debug(self, message: str) -> None:
        self._logger.debug(message)

    def info(self, message: str) -> None:
        self._logger.info(message)

    def warning(self, message: str) -> None:
        self._logger.warning(message)

    def error(self, message: str) -> None:
        self._logger.error(message)


# Global logger instance
logger = Logger()
