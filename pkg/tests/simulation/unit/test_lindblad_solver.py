"""
Tests for the blocked exact solver.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from domain_relaxation.core.registry import get_registry
from domain_relaxation.core.sampling import SamplingGrid
from domain_relaxation.physics import DomainPair, InitialConfig
from domain_relaxation.physics.spin_algebra import SpinDomainError
from domain_relaxation.solvers import (
    BlockedDensityMatrix,
    ClosureSolverConfig,
    ContractViolationError,
    ExactSolverConfig,
    LindbladSolver,
    NumericalCorruptionError,
    build_initial,
    evolve,
    observables,
    rhs
)
from domain_relaxation.solvers.lindblad_solver import collective_dissipator


class TestBlockedDensityMatrix:
    """Tests for BlockedDensityMatrix."""

    def test_missing_blocks_are_zero(self):
        """Test that unspecified blocks are filled with zeros."""
        rho = BlockedDensityMatrix.zeros(DomainPair.of(2, 1))
        assert sorted(rho.blocks) == [-3, -1, 1, 3]
        assert rho.trace() == 0
        assert rho.occupied == {}

    def test_wrong_block_shape(self):
        """Test rejection of a block with the wrong dimension."""
        with pytest.raises(ValueError):
            BlockedDensityMatrix(DomainPair.of(2, 1), {1: np.eye(3)})

    def test_unknown_magnetization(self):
        """Test rejection of a block key outside the magnetization range."""
        with pytest.raises(ValueError):
            BlockedDensityMatrix(DomainPair.of(2, 1), {5: np.eye(1)})

    def test_blocks_are_read_only(self):
        """Test that stored blocks cannot be written."""
        rho = build_initial(InitialConfig.antiparallel(), DomainPair.of(2, 1))
        with pytest.raises(ValueError):
            rho.blocks[1][0, 0] = 0.5

    def test_dense_round_trip(self, random_blocked_state):
        """Test conversion to and from the full matrix."""
        rho = random_blocked_state(DomainPair.of(3, 2), complex_entries=True)
        back = BlockedDensityMatrix.from_dense(rho.domains, rho.to_dense())
        for two_M, block in rho.blocks.items():
            np.testing.assert_allclose(back.blocks[two_M], block)

    def test_arithmetic(self, random_blocked_state):
        """Test addition, scaling and hermiticity."""
        rho = random_blocked_state(DomainPair.of(2, 2), complex_entries=True)
        total = rho + rho.scaled(2.0)
        assert total.trace() == pytest.approx(3.0)
        assert rho.hermiticity_error() < 1e-14
        assert rho.min_eigenvalue() >= -1e-14
        with pytest.raises(ContractViolationError):
            rho + BlockedDensityMatrix.zeros(DomainPair.of(2, 1))


class TestBuildInitial:
    """Tests for initial states."""

    def test_antiparallel(self):
        """Test the antiparallel product state and its observables."""
        rho = build_initial(InitialConfig.antiparallel(), DomainPair.of(10, 10))
        assert list(rho.occupied) == [0]
        record = observables(rho)
        assert record.trace == pytest.approx(1.0)
        assert record.jz1 == pytest.approx(5.0)
        assert record.jz2 == pytest.approx(-5.0)
        assert record.a12 == 0.0
        assert record.jz1jz2 == pytest.approx(-25.0)
        assert record.jtot2 == pytest.approx(10.0)

    def test_parallel(self):
        """Test that the parallel state is the stretched total-spin state."""
        record = observables(build_initial(InitialConfig.parallel(), DomainPair.of(10, 10)))
        assert record.jz1jz2 == pytest.approx(25.0)
        assert record.jtot2 == pytest.approx(110.0)

    def test_custom(self):
        """Test a custom product state."""
        rho = build_initial(InitialConfig.custom(0, 0.5), DomainPair.of(2, 1))
        assert list(rho.occupied) == [1]
        assert observables(rho).jz2 == pytest.approx(0.5)

    def test_custom_out_of_range(self):
        """Test rejection of m1 outside the domain."""
        with pytest.raises(SpinDomainError):
            build_initial(InitialConfig.custom(1.5, 0.5), DomainPair.of(2, 1))

    def test_coupled_singlet(self):
        """Test the singlet of two spin-1/2 domains."""
        record = observables(build_initial(InitialConfig.coupled(0, 0), DomainPair.of(1, 1)))
        assert record.jtot2 == pytest.approx(0.0, abs=1e-12)
        assert record.a12 == pytest.approx(-1.0)
        assert record.jz1jz2 == pytest.approx(-0.25)


class TestGenerator:
    """Tests for the block generator."""

    def test_single_spin_decay(self, zero_temperature):
        """Test d<Jz>/dt = -2 gamma for an excited spin at T = 0."""
        rho = build_initial(InitialConfig.parallel(), DomainPair.of(1, 0))
        assert observables(rhs(rho, zero_temperature)).jz1 == pytest.approx(-0.02)

    def test_ground_state_is_stationary(self, zero_temperature):
        """Test that the all-down state does not evolve at T = 0."""
        rho = build_initial(InitialConfig.custom(-1.5, -1), DomainPair.of(3, 2))
        derivative = rhs(rho, zero_temperature)
        assert all(not np.any(block) for block in derivative.blocks.values())

    def test_superradiant_rate(self, zero_temperature):
        """Test d<Jz>/dt = -2 gamma (N1 + N2) for the parallel state."""
        rho = build_initial(InitialConfig.parallel(), DomainPair.of(50, 50))
        record = observables(rhs(rho, zero_temperature))
        assert record.jz1 + record.jz2 == pytest.approx(-2.0)

    def test_trace_and_hermiticity(self, warm_reservoir, random_blocked_state):
        """Test that the generator is trace-free and Hermiticity preserving."""
        rho = random_blocked_state(DomainPair.of(3, 3), complex_entries=True)
        derivative = rhs(rho, warm_reservoir)
        assert abs(derivative.trace()) < 1e-13
        assert derivative.hermiticity_error() < 1e-14

    def test_total_spin_conserved(self, warm_reservoir, random_blocked_state):
        """Test d<J^2>/dt = 0."""
        rho = random_blocked_state(DomainPair.of(4, 2))
        assert observables(rhs(rho, warm_reservoir)).jtot2 == pytest.approx(0.0, abs=1e-12)

    def test_domain_mismatch(self, zero_temperature):
        """Test that a generator rejects states of other domains."""
        rho = build_initial(InitialConfig.antiparallel(), DomainPair.of(1, 1))
        with pytest.raises(ContractViolationError):
            collective_dissipator(DomainPair.of(2, 1)).apply(rho, zero_temperature)

    def test_corrupted_state(self):
        """Test that complex expectation values are reported."""
        rho = BlockedDensityMatrix(DomainPair.of(1, 0), {1: np.array([[1.0 + 1e-6j]])})
        with pytest.raises(NumericalCorruptionError):
            observables(rho)


class TestLindbladSolver:
    """Tests for LindbladSolver."""

    def test_registered(self):
        """Test that the solver serves the 'exact' method."""
        solver = get_registry().create_solver("exact")
        assert isinstance(solver, LindbladSolver)
        assert solver.describe()["method"] == "exact"

    def test_wrong_config_type(self):
        """Test rejection of a configuration of another solver."""
        with pytest.raises(TypeError):
            LindbladSolver(config=ClosureSolverConfig())

    @pytest.mark.parametrize("kwargs", [{"stepper": "Radau"}, {"coherence_cutoff": 1}, {"rtol": 0.0}])
    def test_invalid_config(self, kwargs):
        """Test rejection of invalid configurations."""
        with pytest.raises(ValidationError):
            ExactSolverConfig(**kwargs)

    def test_automatic_cutoff(self):
        """Test that large pairs drop far-off-diagonal sector chains."""
        solver = LindbladSolver()
        assert solver.coherence_cutoff(DomainPair.of(10, 10)) is None
        assert solver.coherence_cutoff(DomainPair.of(100, 100)) == 2
        assert LindbladSolver(ExactSolverConfig(coherence_cutoff=3)).coherence_cutoff(DomainPair.of(10, 10)) == 3

    def test_single_spin_closed_form(self, zero_temperature):
        """Test <Jz>(t) = -1/2 + exp(-2 gamma t) for one spin."""
        rho = build_initial(InitialConfig.parallel(), DomainPair.of(1, 0))
        series = evolve(rho, zero_temperature, 300.0, sampling=301, criterion=None)
        expected = -0.5 + np.exp(-2.0 * 0.01 * series.times_s)
        assert np.max(np.abs(series.jz1 - expected)) < 1e-6
        assert len(series) == 301
        assert not series.converged
        assert series.metadata["frame"] == "rotating"

    def test_stops_at_steady_state(self, zero_temperature):
        """Test early termination once the criterion holds."""
        rho = build_initial(InitialConfig.parallel(), DomainPair.of(1, 0))
        series = evolve(rho, zero_temperature, 3000.0, sampling=3001)
        assert series.converged
        assert series.times_s[-1] < 3000.0
        assert series.metadata["t_star_s"] == series.times_s[-1]
        assert series.jz1[-1] == pytest.approx(-0.5, abs=1e-5)

    def test_domain_mismatch(self, zero_temperature):
        """Test that evolve rejects a state for other domains."""
        rho = build_initial(InitialConfig.antiparallel(), DomainPair.of(1, 1))
        solver = LindbladSolver()
        with pytest.raises(ContractViolationError):
            solver.evolve(rho, DomainPair.of(2, 1), zero_temperature, SamplingGrid(t_max_s=1.0))
