"""
Integration tests for the moment closure against the exact oracle and for
relaxation-time sweeps.
"""

from pathlib import Path

import numpy as np
import pytest
import toml

from domain_relaxation.experiments import Scenario, relaxation_time, run
from domain_relaxation.experiments.sweep import run_sweep
from domain_relaxation.physics import DomainPair, steady_state
from domain_relaxation.solvers import build_initial, evolve, evolve_closure, initial_moments

SCENARIO_DIR = Path(__file__).resolve().parents[3] / "scenarios"


def shipped_scenario(name):
    return Scenario.model_validate(toml.load(SCENARIO_DIR / f"{name}.toml"))


def closure_discrepancy(n, reservoir, config):
    """|<J1z>_closure - <J1z>_oracle| relative to N / 2 for balanced domains."""
    domains = DomainPair.of(n, n)
    series = evolve_closure(initial_moments(config, domains), domains, reservoir, 3000.0, sampling=301, criterion=None)
    predicted = steady_state(domains, config, reservoir)
    return abs(series.jz1[-1] - predicted.jz1) / (n / 2.0)


class TestClosureAccuracy:
    """Closure steady states against the sector oracle."""

    def test_discrepancy_shrinks_with_size(self, zero_temperature, antiparallel):
        """Test that the closure approaches the oracle as N grows."""
        errors = [closure_discrepancy(n, zero_temperature, antiparallel) for n in (10, 100, 1000)]
        assert all(error < 0.2 for error in errors)
        assert errors[0] >= errors[1] >= errors[2]

    def test_balanced_domains_end_equal(self, zero_temperature, antiparallel):
        """Test that balanced antiparallel domains end with equal polarizations."""
        domains = DomainPair.of(100, 100)
        series = evolve_closure(
            initial_moments(antiparallel, domains), domains, zero_temperature, 3000.0, sampling=301, criterion=None
        )
        assert series.jz1[-1] == pytest.approx(series.jz2[-1], abs=1e-6)
        assert series.jz1[-1] < 0.0
        assert series.metadata["invariant_drift"] < 1e-6 * 100 * 100

    def test_single_domain_reduction(self, zero_temperature, parallel):
        """Test the closure against the exact superradiant burst of one domain with N = 100."""
        domains = DomainPair.of(100, 0)
        approximate = evolve_closure(
            initial_moments(parallel, domains), domains, zero_temperature, 20.0, sampling=4001, criterion=None
        )
        exact = evolve(build_initial(parallel, domains), zero_temperature, 20.0, sampling=4001, criterion=None)

        np.testing.assert_allclose(approximate.a12, 0.0, atol=1e-12)
        assert approximate.jz1[0] == exact.jz1[0] == pytest.approx(50.0)
        assert approximate.jz1[-1] == pytest.approx(-50.0, abs=1e-3)
        assert exact.jz1[-1] == pytest.approx(-50.0, abs=1e-3)

        # the factorized flow has no delay fluctuations, so its burst comes first
        crossing_closure = exact.times_s[np.argmax(approximate.jz1 < 0.0)]
        crossing_exact = exact.times_s[np.argmax(exact.jz1 < 0.0)]
        assert crossing_closure < crossing_exact
        assert np.max(np.abs(approximate.jz1 - exact.jz1)) / 50.0 < 0.5

    def test_closure_and_exact_together(self, load_scenario):
        """Test running both methods on one scenario."""
        scenario = load_scenario("fig2a")
        data = scenario.model_dump()
        data["integration"]["method"] = "both"
        results = run(Scenario.model_validate(data))
        assert list(results) == ["exact", "closure"]
        assert results["closure"].trace is None
        assert results["closure"].jz1[0] == 5.0
        assert results["exact"].jz1[0] == pytest.approx(5.0)


@pytest.mark.slow
class TestRelaxationSweeps:
    """Superradiant a/N + b fits over the shipped sweeps."""

    @pytest.fixture(scope="class")
    def fits(self):
        return {name: run_sweep(shipped_scenario(name), max_workers=1) for name in ("fig3a", "fig3b")}

    @pytest.mark.parametrize("name", ["fig3a", "fig3b"])
    def test_fit_quality(self, name, fits):
        """Test a complete sweep with a good inverse-size fit."""
        result = fits[name]
        assert result.complete
        assert [row.n for row in result.rows] == list(range(100, 1001, 100))
        assert result.fit.r_squared >= 0.99
        assert result.fit.a > 0.0

    @pytest.mark.parametrize("name", ["fig3a", "fig3b"])
    @pytest.mark.parametrize("coefficient", ["a", "b"])
    def test_fit_regression(self, name, coefficient, fits, regression_baseline):
        """Test the fit coefficients against the recorded baseline."""
        regression_baseline.check(f"{name}.{coefficient}", getattr(fits[name].fit, coefficient))

    def test_warm_reservoir_relaxes_faster(self, fits):
        """Test that the 400 mK sweep has the smaller size coefficient."""
        assert fits["fig3b"].fit.a < fits["fig3a"].fit.a


@pytest.mark.slow
class TestScenarioSmoke:
    """Every shipped scenario runs to completion."""

    @pytest.mark.parametrize("name", [
        "fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b",
        "fig4a", "fig4b", "fig4c", "fig4d", "fig4e", "fig4f", "fig5",
    ])
    def test_runs(self, name, load_scenario):
        """Test that the scenario produces finite, converged series."""
        for series in run(load_scenario(name)).values():
            assert series.converged
            assert len(series) >= 2


@pytest.mark.slow
class TestLargeUnbalancedPair:
    """The N1 = 10000, N2 = 100 closure run."""

    @pytest.fixture(scope="class")
    def series(self):
        return run(shipped_scenario("fig5"))["closure"]

    def test_small_domain_inverted(self, series):
        """Test that the small domain ends excited and the large one near its ground state."""
        assert series.converged
        assert series.jz2[-1] > 0.0
        assert abs(series.jz1[-1] + 5000.0) <= 0.01 * 5000.0
        assert relaxation_time(series) > 0.0

    @pytest.mark.parametrize("column", ["jz1", "jz2"])
    def test_end_state_regression(self, column, series, regression_baseline):
        """Test the end state against the committed baseline (stored to four decimals)."""
        regression_baseline.check(f"fig5.closure.{column}_final", getattr(series, column)[-1], rel=1e-5)
