"""
Base models for the relaxation simulator.

This module provides the Pydantic bases that solver configurations and the
immutable physical value objects inherit from for consistency and type safety.
"""

from pydantic import BaseModel, ConfigDict


class SolverConfig(BaseModel):
    """
    Base configuration class for all solvers.

    Solvers inherit from this class to declare their tolerances and stepper
    choices. Configuration is immutable after initialization.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")


class ValueModel(BaseModel):
    """
    Base class for immutable physical value objects.

    Reservoirs, initial configurations and sampling grids inherit from this
    class so they can be shared between worker processes without copying
    concerns.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")


class ScenarioSection(BaseModel):
    """
    Base class for the sections of a scenario file.

    Every section maps 1:1 onto a table of the TOML document; unknown keys
    are rejected.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")
