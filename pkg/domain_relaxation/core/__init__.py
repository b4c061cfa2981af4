"""
Relaxation Simulator Core Module

This module provides the core components shared by the solvers:
- Solver: Base class for time integrators and the IntegrationError they raise
- Base models: Pydantic bases for solver configuration and value objects
- Sampling: Sampling grids and the steady-state criterion
- TimeSeries: Sampled observable trajectories
- Registry: Solver and exception registration
"""

from domain_relaxation.core.base_models import ScenarioSection, SolverConfig, ValueModel
from domain_relaxation.core.registry import (
    ComponentInfo,
    ComponentRegistry,
    get_registry,
    register_exception,
    register_solver
)
from domain_relaxation.core.sampling import SamplingGrid, SteadyStateCriterion
from domain_relaxation.core.time_series import SERIES_COLUMNS, UNITS, TimeSeries
from domain_relaxation.core.solver import IntegrationError, Solver
from domain_relaxation.core.stepping import STEPPERS, SampledStepper

__all__ = [
    # Core classes
    "Solver",
    "SampledStepper",
    "STEPPERS",
    "TimeSeries",
    "SERIES_COLUMNS",
    "UNITS",
    # Errors
    "IntegrationError",
    # Base models
    "SolverConfig",
    "ValueModel",
    "ScenarioSection",
    # Sampling
    "SamplingGrid",
    "SteadyStateCriterion",
    # Registry
    "get_registry",
    "ComponentRegistry",
    "ComponentInfo",
    "register_solver",
    "register_exception"
]
