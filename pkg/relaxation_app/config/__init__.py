"""
Configuration module for the relaxation command line.
"""

from relaxation_app.config.app_config import (
    AppConfig,
    EXIT_OK,
    EXIT_IO_ERROR,
    EXIT_VALIDATION_ERROR,
    EXIT_INTEGRATION_ERROR
)

__all__ = [
    "AppConfig",
    "EXIT_OK",
    "EXIT_IO_ERROR",
    "EXIT_VALIDATION_ERROR",
    "EXIT_INTEGRATION_ERROR"
]
