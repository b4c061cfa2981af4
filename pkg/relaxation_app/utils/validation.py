"""
Validation utilities for scenario files and command-line overrides.
"""

import re
from typing import Any, List, Tuple

from pydantic import ValidationError
import toml

from domain_relaxation.experiments.scenario import ScenarioValidationError

_BARE_WORD = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")


def error_key(location: Tuple[Any, ...]) -> str:
    """Dotted key of a pydantic error location; model-level errors point at ``initial``."""
    parts = [str(p) for p in location if not isinstance(p, int)]
    return ".".join(parts) if parts else "initial"


def format_validation_error(error: ValidationError) -> List[Tuple[str, str]]:
    """(dotted key, message) for every error in a pydantic ValidationError."""
    return [(error_key(tuple(e["loc"])), e["msg"]) for e in error.errors()]


def to_scenario_error(error: ValidationError) -> ScenarioValidationError:
    """ScenarioValidationError naming the first offending key."""
    problems = format_validation_error(error)
    key, message = problems[0]
    if len(problems) > 1:
        message += f" (and {len(problems) - 1} more: " + ", ".join(k for k, _ in problems[1:]) + ")"
    return ScenarioValidationError(message, key=key)


def parse_override(text: str) -> Tuple[str, Any]:
    """
    Split ``key=value`` and parse the value as a TOML scalar.

    Bare words such as ``antiparallel`` are taken as strings.

    Raises:
        ScenarioValidationError: For a missing '=' or an unparsable value
    """
    if "=" not in text:
        raise ScenarioValidationError(f"override '{text}' is not of the form key=value", key=text.strip() or None)
    key, raw = (part.strip() for part in text.split("=", 1))
    if not key:
        raise ScenarioValidationError(f"override '{text}' has an empty key")
    try:
        return key, toml.loads(f"value = {raw}")["value"]
    except (ValueError, IndexError) as e:
        if _BARE_WORD.match(raw):
            return key, raw
        raise ScenarioValidationError(f"cannot parse value '{raw}'", key=key) from e
