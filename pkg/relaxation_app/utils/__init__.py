"""
Utility functions for the relaxation command line.
"""

from relaxation_app.utils.formatting import format_float, format_half, format_temperature_k
from relaxation_app.utils.validation import (
    format_validation_error,
    parse_override,
    to_scenario_error
)

__all__ = [
    "format_float",
    "format_half",
    "format_temperature_k",
    "format_validation_error",
    "parse_override",
    "to_scenario_error"
]
