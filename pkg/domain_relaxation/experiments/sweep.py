"""
Relaxation-time sweeps over the domain size.

Each N is an independent job. Jobs run in a process pool, or inline for a
single worker; rows are merged by N, never by completion order.
"""

from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
import logging
from typing import List, Optional, Sequence, Tuple

from domain_relaxation.experiments.relaxation import (
    FitError,
    RelaxationFit,
    fit_inverse_n,
    reference_steady_value,
    relaxation_time
)
from domain_relaxation.experiments.runner import run
from domain_relaxation.experiments.scenario import DEFAULT_MEMORY_BUDGET_BYTES, Scenario

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepRow:
    n: int
    tau_s: float
    steady_jz1: float
    method: str


@dataclass(frozen=True)
class SweepFailure:
    n: int
    error_type: str
    message: str


@dataclass
class SweepResult:
    rows: List[SweepRow] = field(default_factory=list)
    failures: List[SweepFailure] = field(default_factory=list)
    fit: Optional[RelaxationFit] = None

    @property
    def complete(self) -> bool:
        return not self.failures


def sweep_values(base: Scenario, n_values: Optional[Sequence[int]] = None) -> List[int]:
    """
    Sorted distinct sizes to sweep.

    Raises:
        FitError: With fewer than three distinct sizes
    """
    values = n_values if n_values is not None else (base.sweep.n_values if base.sweep else [])
    distinct = sorted(set(int(n) for n in values))
    if len(distinct) < 3:
        raise FitError(f"A sweep needs at least 3 distinct N values for the a/N + b fit, got {distinct}")
    return distinct


def scenario_for(base: Scenario, n: int) -> Scenario:
    vary = base.sweep.vary if base.sweep else "both"
    n1 = n if vary in ("both", "n1") else base.domains.n1
    n2 = n if vary in ("both", "n2") else base.domains.n2
    return base.with_domains(n1, n2)


def run_point(base: Scenario, n: int, memory_budget_bytes: int) -> SweepRow:
    """Relaxation time of one sweep point (module level so worker processes can run it)."""
    scenario = scenario_for(base, n)
    results = run(scenario, memory_budget_bytes)
    method = "closure" if "closure" in results else next(iter(results))
    series = results[method]
    steady = reference_steady_value(
        series, scenario.domain_pair(), scenario.initial, scenario.reservoir_spec()
    )
    return SweepRow(n=n, tau_s=relaxation_time(series, steady), steady_jz1=steady, method=method)


def run_sweep(
    base: Scenario,
    n_values: Optional[Sequence[int]] = None,
    max_workers: int = 1,
    memory_budget_bytes: int = DEFAULT_MEMORY_BUDGET_BYTES
) -> SweepResult:
    """
    Relaxation times for each N and the a/N + b fit over the completed rows.

    Failing points are collected in ``failures``; the fit needs at least
    three completed rows.

    Raises:
        FitError: With fewer than three distinct sizes requested
    """
    values = sweep_values(base, n_values)
    result = SweepResult()
    logger.info(f"Sweep '{base.name}' over N={values} with {max_workers} worker(s)")

    def record(n: int, outcome: Tuple[Optional[SweepRow], Optional[Exception]]) -> None:
        row, error = outcome
        if error is None:
            result.rows.append(row)
            logger.info(f"Sweep point N={n}: tau={row.tau_s:.6g} s")
        else:
            logger.error(f"Sweep point N={n} failed: {type(error).__name__}: {error}")
            result.failures.append(SweepFailure(n, type(error).__name__, str(error)))

    if max_workers <= 1:
        for n in values:
            try:
                record(n, (run_point(base, n, memory_budget_bytes), None))
            except Exception as e:
                record(n, (None, e))
    else:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            futures = {pool.submit(run_point, base, n, memory_budget_bytes): n for n in values}
            for future in as_completed(futures):
                n = futures[future]
                try:
                    record(n, (future.result(), None))
                except Exception as e:
                    record(n, (None, e))

    result.rows.sort(key=lambda row: row.n)
    result.failures.sort(key=lambda failure: failure.n)
    if len(result.rows) >= 3:
        result.fit = fit_inverse_n([(row.n, row.tau_s) for row in result.rows])
    else:
        logger.warning(f"Only {len(result.rows)} sweep point(s) completed; no fit")
    return result
