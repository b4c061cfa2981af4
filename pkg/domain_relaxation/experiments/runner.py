"""
Running a scenario through its solver(s).
"""

from dataclasses import replace
import logging
from typing import Dict

from domain_relaxation.core.registry import get_registry
from domain_relaxation.core.time_series import TimeSeries
from domain_relaxation.experiments.scenario import (
    DEFAULT_MEMORY_BUDGET_BYTES,
    Scenario,
    validate_exact_budget
)
from domain_relaxation.experiments.steady_state import detect_steady
import domain_relaxation.solvers  # noqa: F401  (registers the solvers)

logger = logging.getLogger(__name__)


def _solver_for(method: str, scenario: Scenario):
    registry = get_registry()
    info = registry.get_solver(method)
    if info is None:
        raise KeyError(f"No solver registered for method '{method}'")
    overrides = {
        name: value
        for name, value in (("rtol", scenario.integration.rtol), ("atol", scenario.integration.atol))
        if value is not None
    }
    config = info.associated_classes["config"](**overrides) if overrides else None
    return registry.create_solver(method, config)


def run(scenario: Scenario, memory_budget_bytes: int = DEFAULT_MEMORY_BUDGET_BYTES) -> Dict[str, TimeSeries]:
    """
    Run every method the scenario asks for on a shared sampling grid.

    Returns:
        Series keyed by method name, in ``exact``, ``closure`` order

    Raises:
        ScenarioValidationError: For exact runs over the memory budget
        IntegrationError: If a solver fails
    """
    validate_exact_budget(scenario, memory_budget_bytes)
    domains = scenario.domain_pair()
    reservoir = scenario.reservoir_spec()
    grid = scenario.grid()
    steady = scenario.steady_state
    criterion = steady.criterion() if steady.stop_at_steady else None
    snapshot = scenario.model_dump(mode="json")

    results: Dict[str, TimeSeries] = {}
    for method in scenario.integration.methods:
        solver = _solver_for(method, scenario)
        state = solver.initial_state(domains, scenario.initial)
        series = solver.evolve(state, domains, reservoir, grid, criterion)
        if criterion is None:
            detected = detect_steady(series, steady.window, steady.eps)
            series = replace(series, converged=detected.converged)
            series = series.with_scenario(snapshot, t_star_s=detected.t_star_s)
        results[method] = series.with_scenario(
            snapshot,
            scenario_name=scenario.name,
            schema_version=scenario.schema_version,
        )
        logger.info(
            f"Scenario '{scenario.name}' [{method}]: {len(series)} samples, converged={series.converged}"
        )
    return results
