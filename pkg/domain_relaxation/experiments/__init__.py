"""
Experiments module for the relaxation simulator.

Scenario validation, runs over the registered solvers, steady-state
detection, relaxation times and size sweeps.
"""

from domain_relaxation.experiments.scenario import (
    Scenario,
    ScenarioValidationError,
    DEFAULT_MEMORY_BUDGET_BYTES,
    exact_memory_estimate,
    validate_exact_budget
)
from domain_relaxation.experiments.runner import run
from domain_relaxation.experiments.steady_state import SteadyStateResult, detect_steady
from domain_relaxation.experiments.relaxation import (
    TAU_DEFINITION,
    FitError,
    RelaxationFit,
    UnconvergedSeriesError,
    fit_inverse_n,
    reference_steady_value,
    relaxation_time
)
from domain_relaxation.experiments.sweep import SweepResult, SweepRow, run_sweep

__all__ = [
    # Scenarios
    "Scenario",
    "ScenarioValidationError",
    "DEFAULT_MEMORY_BUDGET_BYTES",
    "exact_memory_estimate",
    "validate_exact_budget",
    # Runs
    "run",
    "SteadyStateResult",
    "detect_steady",
    # Relaxation
    "TAU_DEFINITION",
    "FitError",
    "RelaxationFit",
    "UnconvergedSeriesError",
    "fit_inverse_n",
    "reference_steady_value",
    "relaxation_time",
    # Sweeps
    "SweepResult",
    "SweepRow",
    "run_sweep"
]
