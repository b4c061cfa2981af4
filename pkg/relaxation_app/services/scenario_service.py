"""
Loading, overriding and serializing scenario files.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from pydantic import BaseModel, ValidationError
import toml

from domain_relaxation.experiments.scenario import Scenario, ScenarioValidationError
from relaxation_app.utils.validation import parse_override, to_scenario_error

logger = logging.getLogger(__name__)


def _section_model(annotation: Any) -> Optional[type]:
    """The model class of a section field, unwrapping Optional."""
    candidates = [annotation] + list(getattr(annotation, "__args__", ()))
    for candidate in candidates:
        if isinstance(candidate, type) and issubclass(candidate, BaseModel):
            return candidate
    return None


def scenario_keys() -> Dict[str, List[str]]:
    """Dotted keys of every scenario field, indexed by leaf name."""
    index: Dict[str, List[str]] = {}
    for name, info in Scenario.model_fields.items():
        section = _section_model(info.annotation)
        if section is None:
            index.setdefault(name, []).append(name)
            continue
        for leaf in section.model_fields:
            index.setdefault(leaf, []).append(f"{name}.{leaf}")
    return index


class ScenarioService:
    """Service for scenario files."""

    @staticmethod
    def resolve_key(key: str) -> str:
        """
        Dotted path of an override key.

        Raises:
            ScenarioValidationError: For unknown or ambiguous keys
        """
        index = scenario_keys()
        if "." in key:
            if key not in {path for paths in index.values() for path in paths}:
                raise ScenarioValidationError("unknown scenario key", key=key)
            return key
        paths = index.get(key)
        if not paths:
            raise ScenarioValidationError("unknown scenario key", key=key)
        if len(paths) > 1:
            raise ScenarioValidationError(f"ambiguous key, use one of {', '.join(paths)}", key=key)
        return paths[0]

    @staticmethod
    def apply_overrides(data: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
        """Copy of a raw scenario document with ``key=value`` overrides applied."""
        result = {k: dict(v) if isinstance(v, dict) else v for k, v in data.items()}
        for text in overrides:
            key, value = parse_override(text)
            path = ScenarioService.resolve_key(key).split(".")
            target = result
            for part in path[:-1]:
                target = target.setdefault(part, {})
            target[path[-1]] = value
            logger.info(f"Override {'.'.join(path)} = {value!r}")
        return result

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> Scenario:
        """
        Validate a raw scenario document.

        Raises:
            ScenarioValidationError: Naming the first offending key
        """
        try:
            return Scenario.model_validate(data)
        except ValidationError as e:
            raise to_scenario_error(e) from e

    @staticmethod
    def loads(text: str, overrides: Sequence[str] = ()) -> Scenario:
        try:
            data = toml.loads(text)
        except toml.TomlDecodeError as e:
            raise ScenarioValidationError(f"malformed TOML: {e}") from e
        return ScenarioService.from_dict(ScenarioService.apply_overrides(data, overrides))

    @staticmethod
    def load(path: Union[str, Path], overrides: Sequence[str] = ()) -> Scenario:
        """
        Read a scenario file.

        Raises:
            OSError: If the file cannot be read
            ScenarioValidationError: For malformed or invalid scenarios
        """
        text = Path(path).read_text(encoding="utf-8")
        scenario = ScenarioService.loads(text, overrides)
        logger.info(f"Loaded scenario '{scenario.name}' from {path}")
        return scenario

    @staticmethod
    def dumps(scenario: Scenario) -> str:
        """TOML text that loads back to an equal scenario."""
        return toml.dumps(scenario.model_dump(mode="json", exclude_none=True))
