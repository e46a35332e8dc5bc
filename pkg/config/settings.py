"""
Configuration settings for the KMB09 simulation toolkit.

Every value can be overridden by an environment variable of the same name in
upper case, or by a ``.env`` file in the project root.
"""
import os
from pathlib import Path
from typing import List

from src.utils.exceptions import ConfigurationError


def _env_flag(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() == "true"


class Settings:
    """Application settings with environment variable support."""

    def __init__(self):
        self._load_env_file()

        # Application
        self.app_name = os.getenv("APP_NAME", "KMBQKD")
        self.app_version = os.getenv("APP_VERSION", "1.0.0")
        self.log_level = os.getenv("LOG_LEVEL", "INFO")
        self.log_to_file = _env_flag("LOG_TO_FILE", "False")

        # Sessions
        self.default_test_fraction = float(os.getenv("DEFAULT_TEST_FRACTION", "0.2"))
        self.default_photons = int(os.getenv("DEFAULT_PHOTONS", "100000"))
        self.max_workers = int(os.getenv("MAX_WORKERS", "1"))

        # Sweeps
        self.default_grid = int(os.getenv("DEFAULT_GRID", "360"))

        # Signature check
        self.signature_threshold = float(os.getenv("SIGNATURE_THRESHOLD", "3.0"))
        self.calibration_seeds = int(os.getenv("CALIBRATION_SEEDS", "20"))
        self.calibration_quantile = float(os.getenv("CALIBRATION_QUANTILE", "0.99"))

        # Output; unset means <project_root>/data/output
        self.output_dir_path = os.getenv("OUTPUT_DIR")

        problems = self.validate()
        if problems:
            raise ConfigurationError("Invalid settings: " + "; ".join(problems))

    def _load_env_file(self):
        """Load environment variables from .env file."""
        try:
            from dotenv import load_dotenv
            env_file = Path(__file__).parent.parent / ".env"
            if env_file.exists():
                load_dotenv(env_file)
        except ImportError:
            pass  # dotenv not available, skip

    def validate(self) -> List[str]:
        """Return a description of every out-of-range value."""
        problems = []
        if not 0.0 < self.default_test_fraction <= 1.0:
            problems.append(f"DEFAULT_TEST_FRACTION must lie in (0, 1], got {self.default_test_fraction}")
        if self.default_photons < 1:
            problems.append(f"DEFAULT_PHOTONS must be >= 1, got {self.default_photons}")
        if self.max_workers < 1:
            problems.append(f"MAX_WORKERS must be >= 1, got {self.max_workers}")
        if self.default_grid < 2:
            problems.append(f"DEFAULT_GRID must be >= 2, got {self.default_grid}")
        if self.signature_threshold <= 0.0:
            problems.append(f"SIGNATURE_THRESHOLD must be positive, got {self.signature_threshold}")
        if self.calibration_seeds < 1:
            problems.append(f"CALIBRATION_SEEDS must be >= 1, got {self.calibration_seeds}")
        if not 0.0 <= self.calibration_quantile <= 1.0:
            problems.append(f"CALIBRATION_QUANTILE must lie in [0, 1], got {self.calibration_quantile}")
        return problems

    @property
    def project_root(self) -> Path:
        return Path(__file__).parent.parent

    @property
    def data_dir(self) -> Path:
        return self.project_root / "data"

    @property
    def output_dir(self) -> Path:
        """Default directory for sweep files and traces."""
        if self.output_dir_path:
            return Path(self.output_dir_path)
        return self.data_dir / "output"

    @property
    def logs_dir(self) -> Path:
        return self.project_root / "logs"

    def ensure_directories(self) -> None:
        """Create the output directory, and the log directory when file logging is on."""
        directories = [self.output_dir]
        if self.log_to_file:
            directories.append(self.logs_dir)

        for directory in directories:
            directory.mkdir(parents=True, exist_ok=True)


# Global settings instance
settings = Settings()
