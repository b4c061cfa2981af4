"""
Tests for the registry, sampling grids, time series and the sampled stepper.
"""

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.integrate import RK45

from domain_relaxation.core import (
    ComponentRegistry,
    IntegrationError,
    SampledStepper,
    SamplingGrid,
    SolverConfig,
    SteadyStateCriterion,
    TimeSeries,
    get_registry
)
import domain_relaxation.solvers  # noqa: F401


class DummySolver:
    pass


class DummySolverConfig(SolverConfig):
    pass


class TestComponentRegistry:
    """Tests for ComponentRegistry."""

    def test_registry_is_singleton(self):
        """Test that get_registry returns the global registry."""
        assert get_registry() is get_registry()

    def test_registered_methods(self):
        """Test that both solvers are registered with their configs."""
        registry = get_registry()
        assert registry.available_methods() == ["closure", "exact"]
        assert registry.get_solver("exact").associated_classes["config"].__name__ == "ExactSolverConfig"
        assert registry.get_solver("closure").name == "ClosureSolver"
        assert registry.get_solver("missing") is None

    def test_naming_conventions(self):
        """Test that every registered component follows the naming rules."""
        assert get_registry().validate_naming_conventions() == []

    def test_exceptions_registered(self):
        """Test registration of the package exceptions."""
        registry = get_registry()
        for name in ("IntegrationError", "SpinDomainError", "UnsupportedInputError",
                     "ContractViolationError", "NumericalCorruptionError"):
            assert registry.get_exception(name) is not None
            assert registry.is_registered(name)

    def test_unknown_method(self):
        """Test that an unknown method cannot be instantiated."""
        with pytest.raises(KeyError):
            get_registry().create_solver("spectral")

    def test_duplicate_registration(self):
        """Test rejection of a second solver for a method."""
        registry = ComponentRegistry()
        registry.register_solver(DummySolver, method="dummy", config_class=DummySolverConfig)
        with pytest.raises(ValueError):
            registry.register_solver(DummySolver, method="other")

    def test_report(self):
        """Test the registry report."""
        report = get_registry().generate_report()
        assert set(report["solvers"]) == {"closure", "exact"}
        assert report["solvers"]["exact"]["config"] == "ExactSolverConfig"
        assert "IntegrationError" in report["exceptions"]


class TestSampling:
    """Tests for sampling grids and the steady-state criterion."""

    def test_grid(self):
        """Test uniform sample times."""
        grid = SamplingGrid(t_max_s=10.0, sample_count=11)
        np.testing.assert_allclose(grid.times_s(), np.arange(11.0))
        assert grid.spacing_s == 1.0

    def test_invalid_grid(self):
        """Test rejection of degenerate grids."""
        with pytest.raises(ValidationError):
            SamplingGrid(t_max_s=0.0)
        with pytest.raises(ValidationError):
            SamplingGrid(t_max_s=1.0, sample_count=1)

    def test_threshold(self):
        """Test eps * gamma * max(N1, N2) / 2."""
        assert SteadyStateCriterion().threshold(0.01, 10, 4) == pytest.approx(5e-8)

    def test_first_index(self):
        """Test that the window must be filled without interruption."""
        criterion = SteadyStateCriterion(window=3, eps=1.0)
        small = [1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]
        assert criterion.first_index(small, np.zeros(8), 2.0, 1, 1) == 6
        assert criterion.first_index(small, np.ones(8), 2.0, 1, 1) is None
        assert criterion.first_index([0.0, 0.0], [0.0, 0.0], 2.0, 1, 1) is None


class TestTimeSeries:
    """Tests for TimeSeries."""

    def make(self, **kwargs):
        values = dict(
            times_s=[0.0, 1.0, 2.0],
            jz1=[1.0, 0.5, 0.0],
            jz2=[-1.0, -0.5, 0.0],
            a12=[0.0, 0.1, 0.2],
            jz1jz2=[-1.0, -0.25, 0.0],
            method="closure",
        )
        values.update(kwargs)
        return TimeSeries(**values)

    def test_arrays_are_read_only(self):
        """Test that sample arrays cannot be written."""
        series = self.make()
        with pytest.raises(ValueError):
            series.jz1[0] = 3.0

    def test_validation(self):
        """Test rejection of unordered times and ragged arrays."""
        with pytest.raises(ValueError):
            self.make(times_s=[0.0, 2.0, 1.0])
        with pytest.raises(ValueError):
            self.make(jz2=[0.0, 1.0])
        with pytest.raises(ValueError):
            self.make(times_s=[], jz1=[], jz2=[], a12=[], jz1jz2=[])

    def test_columns(self):
        """Test export columns with absent observables."""
        series = self.make()
        columns = series.columns()
        np.testing.assert_allclose(columns["jz_sum"], [0.0, 0.0, 0.0])
        assert np.all(np.isnan(columns["trace"]))
        assert columns["method"] == ["closure"] * 3
        assert series.final() == {"t_s": 2.0, "jz1": 0.0, "jz2": 0.0, "a12": 0.2, "jz1jz2": 0.0}

    def test_with_scenario(self):
        """Test that scenario snapshots are attached without touching the original."""
        series = self.make(metadata={"n1": 2})
        tagged = series.with_scenario({"name": "x"}, scenario_name="x")
        assert tagged.scenario == {"name": "x"}
        assert tagged.metadata == {"n1": 2, "scenario_name": "x"}
        assert series.metadata == {"n1": 2}


class TestSampledStepper:
    """Tests for SampledStepper."""

    def test_samples_exponential_decay(self):
        """Test dense-output sampling of y' = -y."""
        grid = np.linspace(0.0, 2.0, 21)
        solver = RK45(lambda t, y: -y, 0.0, np.array([1.0]), grid[-1], rtol=1e-10, atol=1e-12)
        seen = []
        last = SampledStepper(seconds_per_unit=1.0).run(solver, grid, lambda i, t, y: seen.append((t, y[0])) or False)
        assert last == 20
        times, values = np.array(seen).T
        np.testing.assert_allclose(times, grid)
        np.testing.assert_allclose(values, np.exp(-grid), rtol=1e-8)

    def test_stop_early(self):
        """Test that the sample hook can stop integration."""
        grid = np.linspace(0.0, 1.0, 11)
        solver = RK45(lambda t, y: -y, 0.0, np.array([1.0]), grid[-1])
        assert SampledStepper(1.0).run(solver, grid, lambda i, t, y: i == 4) == 4

    def test_switch_hook(self):
        """Test that a replacement solver is adopted and recorded."""
        grid = np.linspace(0.0, 5.0, 6)
        solver = RK45(lambda t, y: -y, 0.0, np.array([1.0]), grid[-1], max_step=0.01)

        def switch(current):
            return RK45(current.fun, current.t, current.y, grid[-1]) if current.t < 1.0 else None

        stepper = SampledStepper(2.0, switch=switch, switch_interval=5)
        stepper.run(solver, grid, lambda i, t, y: False)
        assert len(stepper.history) >= 2
        assert stepper.history[1][1] > 0.0

    def test_blow_up(self):
        """Test that a finite-time blow-up is reported with the last good time."""
        grid = np.linspace(0.0, 2.0, 5)
        solver = RK45(lambda t, y: y * y, 0.0, np.array([1.0]), grid[-1])
        with pytest.raises(IntegrationError) as error:
            SampledStepper(1.0).run(solver, grid, lambda i, t, y: False)
        assert error.value.last_good_time_s <= 1.0
