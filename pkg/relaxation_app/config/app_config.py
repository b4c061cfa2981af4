"""
Application configuration for the relaxation command line.
"""

import os
from dataclasses import dataclass, field
from dotenv import load_dotenv

from domain_relaxation.experiments.scenario import DEFAULT_MEMORY_BUDGET_BYTES

# Load environment variables
load_dotenv()

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

# Smallest budget accepted for the exact solver (1 MiB).
MIN_MEMORY_BUDGET_BYTES = 1 << 20


def _int_env(name: str, default: int) -> int:
    value = os.getenv(name, "").strip()
    try:
        return int(value) if value else default
    except ValueError:
        return default


@dataclass
class AppConfig:
    """Main application configuration."""

    # Exact solver
    exact_memory_bytes: int = field(
        default_factory=lambda: _int_env("DOMAIN_RELAX_EXACT_MEMORY_BYTES", DEFAULT_MEMORY_BUDGET_BYTES)
    )

    # Sweeps
    max_workers: int = field(default_factory=lambda: _int_env("DOMAIN_RELAX_MAX_WORKERS", os.cpu_count() or 1))

    # Logging
    log_level: str = field(default_factory=lambda: os.getenv("DOMAIN_RELAX_LOG_LEVEL", "WARNING"))

    def __post_init__(self) -> None:
        """Clamp configuration values."""
        if self.exact_memory_bytes < MIN_MEMORY_BUDGET_BYTES:
            self.exact_memory_bytes = MIN_MEMORY_BUDGET_BYTES

        if self.max_workers < 1:
            self.max_workers = 1
        if self.max_workers > 64:
            self.max_workers = 64

        self.log_level = self.log_level.upper()
        if self.log_level not in LOG_LEVELS:
            self.log_level = "WARNING"


# Exit statuses of the command line
EXIT_OK = 0
EXIT_IO_ERROR = 1
EXIT_VALIDATION_ERROR = 2
EXIT_INTEGRATION_ERROR = 3
