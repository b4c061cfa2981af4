"""
Exact integration of the collective master equation.

    d rho/dt = gamma (n+1) L(J-_tot) rho + gamma n L(J+_tot) rho,
    L(A) rho = 2 A rho A^+ - A^+ A rho - rho A^+ A

The coherent term -i omega_s [J1z + J2z, rho] is dropped (rotating frame):
it leaves every reported observable unchanged. The density matrix is kept
as independent blocks of fixed total magnetization M; the generator only
links block M to M +- 1 through the J-_tot maps.
"""

from dataclasses import dataclass
from functools import lru_cache
import logging
from typing import Dict, Mapping, Optional, Type

import numpy as np
from pydantic import Field
import scipy.sparse as sparse
from typing_extensions import Literal

from domain_relaxation.core.base_models import SolverConfig
from domain_relaxation.core.registry import register_exception, register_solver
from domain_relaxation.core.sampling import SamplingGrid, SteadyStateCriterion
from domain_relaxation.core.solver import IntegrationError, Solver
from domain_relaxation.core.stepping import STEPPERS, SampledStepper
from domain_relaxation.core.time_series import TimeSeries
from domain_relaxation.physics.clebsch_gordan import coupled_state_vector
from domain_relaxation.physics.initial_config import InitialConfig
from domain_relaxation.physics.reservoir import ReservoirSpec
from domain_relaxation.physics.spin_algebra import (
    DomainPair,
    block_offsets,
    flip_flop_block,
    half,
    lowering_map,
    magnetization_block
)
from domain_relaxation.solvers.sector_frame import (
    OBSERVABLE_SECTOR_OFFSET,
    OBSERVABLES,
    chain_element_count,
    sector_frame
)

logger = logging.getLogger(__name__)

# Imaginary parts of expectation values above this signal a corrupted state.
IMAGINARY_RESIDUE_LIMIT = 1e-10


@register_exception
class ContractViolationError(ValueError):
    """Raised when a state is applied to an operator cache built for other domains."""
    pass


@register_exception
class NumericalCorruptionError(IntegrationError):
    """Raised when a state produces non-real or non-finite expectation values."""
    pass


@dataclass(frozen=True, eq=False)
class BlockedDensityMatrix:
    """
    Density matrix stored as one dense block per total magnetization.

    ``blocks`` maps 2M to a square matrix over the block's product states
    (m1 descending). Every magnetization of the domain pair is present;
    unoccupied blocks are zero. Blocks are read-only.
    """

    domains: DomainPair
    blocks: Mapping[int, np.ndarray]

    def __post_init__(self):
        frozen: Dict[int, np.ndarray] = {}
        for two_M in self.domains.two_M_values():
            dimension = magnetization_block(self.domains.n1, self.domains.n2, two_M).dimension
            if two_M in self.blocks:
                block = np.array(self.blocks[two_M], copy=True)
                if block.shape != (dimension, dimension):
                    raise ValueError(
                        f"Block M={half(two_M)} has shape {block.shape}, expected {(dimension, dimension)}"
                    )
            else:
                block = np.zeros((dimension, dimension))
            block.setflags(write=False)
            frozen[two_M] = block
        extra = set(self.blocks) - set(frozen)
        if extra:
            raise ValueError(f"Blocks {sorted(extra)} are not magnetizations of N=({self.domains.n1}, {self.domains.n2})")
        object.__setattr__(self, "blocks", frozen)

    @classmethod
    def zeros(cls, domains: DomainPair) -> "BlockedDensityMatrix":
        return cls(domains, {})

    @classmethod
    def pure(cls, domains: DomainPair, two_M: int, vector: np.ndarray) -> "BlockedDensityMatrix":
        """|psi><psi| for a state vector living in block M."""
        vector = np.asarray(vector)
        return cls(domains, {two_M: np.outer(vector, np.conj(vector))})

    @property
    def occupied(self) -> Dict[int, np.ndarray]:
        """Blocks with any nonzero entry."""
        return {two_M: b for two_M, b in self.blocks.items() if np.any(b)}

    def trace(self) -> complex:
        return complex(sum(np.trace(b) for b in self.blocks.values()))

    def hermiticity_error(self) -> float:
        return max(float(np.max(np.abs(b - b.conj().T))) for b in self.blocks.values())

    def min_eigenvalue(self, two_M: Optional[int] = None) -> float:
        """Smallest eigenvalue of one block, or of the whole state."""
        keys = [two_M] if two_M is not None else list(self.blocks)
        return min(float(np.linalg.eigvalsh((self.blocks[k] + self.blocks[k].conj().T) / 2.0)[0]) for k in keys)

    def to_dense(self) -> np.ndarray:
        """Full matrix over the product space, blocks ordered by M descending."""
        offsets = block_offsets(self.domains)
        size = self.domains.product_dimension
        dtype = np.result_type(*self.blocks.values())
        dense = np.zeros((size, size), dtype=dtype)
        for two_M, block in self.blocks.items():
            start = offsets[two_M]
            stop = start + block.shape[0]
            dense[start:stop, start:stop] = block
        return dense

    @classmethod
    def from_dense(cls, domains: DomainPair, dense: np.ndarray) -> "BlockedDensityMatrix":
        """Diagonal blocks of a full matrix (entries between blocks are dropped)."""
        offsets = block_offsets(domains)
        blocks = {}
        for two_M, start in offsets.items():
            dimension = magnetization_block(domains.n1, domains.n2, two_M).dimension
            blocks[two_M] = dense[start:start + dimension, start:start + dimension]
        return cls(domains, blocks)

    def __add__(self, other: "BlockedDensityMatrix") -> "BlockedDensityMatrix":
        if other.domains != self.domains:
            raise ContractViolationError("Cannot add states of different domain pairs")
        return BlockedDensityMatrix(self.domains, {k: b + other.blocks[k] for k, b in self.blocks.items()})

    def scaled(self, factor: float) -> "BlockedDensityMatrix":
        return BlockedDensityMatrix(self.domains, {k: factor * b for k, b in self.blocks.items()})


@dataclass(frozen=True)
class ObservableRecord:
    jz1: float
    jz2: float
    a12: float
    jz1jz2: float
    jtot2: float
    trace: float

    def as_dict(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in OBSERVABLES}


def build_initial(config: InitialConfig, domains: DomainPair) -> BlockedDensityMatrix:
    """
    Pure initial state for a configuration.

    Product configurations occupy the single entry of |m1, m2> in block
    M = m1 + m2; a coupled configuration fills block M with |J, M><J, M|.

    Raises:
        SpinDomainError: If the configuration does not fit the domains
    """
    if config.is_product:
        index = config.product_index(domains)
        block = magnetization_block(domains.n1, domains.n2, index.two_M)
        vector = np.zeros(block.dimension)
        vector[block.index_of(index.two_m1)] = 1.0
        return BlockedDensityMatrix.pure(domains, index.two_M, vector)
    two_J, two_M = config.coupled_numbers(domains)
    vector = coupled_state_vector(domains.n1, domains.n2, two_J, two_M)
    return BlockedDensityMatrix.pure(domains, two_M, vector)


class CollectiveDissipator:
    """
    Operator cache for the block-to-block generator of one domain pair.

    Holds J-_tot between neighbouring blocks, K_M = J+J- and K'_M = J-J+ on
    each block.
    """

    def __init__(self, domains: DomainPair):
        self.domains = domains
        n1, n2 = domains.n1, domains.n2
        bottom = -domains.two_M_max
        self._lower: Dict[int, sparse.csr_matrix] = {
            two_M: lowering_map(n1, n2, two_M) for two_M in domains.two_M_values() if two_M > bottom
        }
        self._down_up: Dict[int, sparse.csr_matrix] = {}
        self._up_down: Dict[int, sparse.csr_matrix] = {}
        for two_M in domains.two_M_values():
            if two_M in self._lower:
                lower = self._lower[two_M]
                self._down_up[two_M] = (lower.T @ lower).tocsr()
            if two_M + 2 in self._lower:
                above = self._lower[two_M + 2]
                self._up_down[two_M] = (above @ above.T).tocsr()

    def _check(self, rho: BlockedDensityMatrix) -> None:
        if rho.domains != self.domains:
            raise ContractViolationError(
                f"State for N=({rho.domains.n1}, {rho.domains.n2}) applied to the generator of "
                f"N=({self.domains.n1}, {self.domains.n2})"
            )

    def apply(self, rho: BlockedDensityMatrix, reservoir: ReservoirSpec) -> BlockedDensityMatrix:
        """d rho / dt in s^-1."""
        self._check(rho)
        down = reservoir.emission_rate
        up = reservoir.absorption_rate
        result: Dict[int, np.ndarray] = {}

        for two_M, block in rho.blocks.items():
            out = np.zeros(block.shape, dtype=np.result_type(block, float))
            if two_M in self._down_up:
                k = self._down_up[two_M]
                out -= down * (k @ block + (k @ block.T).T)
            if two_M + 2 in self._lower:
                lower = self._lower[two_M + 2]
                out += 2.0 * down * (lower @ (lower @ rho.blocks[two_M + 2].T).T)
            if up:
                if two_M in self._up_down:
                    k = self._up_down[two_M]
                    out -= up * (k @ block + (k @ block.T).T)
                if two_M in self._lower:
                    raising = self._lower[two_M].T
                    out += 2.0 * up * (raising @ (raising @ rho.blocks[two_M - 2].T).T)
            result[two_M] = out

        return BlockedDensityMatrix(self.domains, result)


@lru_cache(maxsize=16)
def collective_dissipator(domains: DomainPair) -> CollectiveDissipator:
    return CollectiveDissipator(domains)


def rhs(rho: BlockedDensityMatrix, reservoir: ReservoirSpec) -> BlockedDensityMatrix:
    """Time derivative of a blocked state under the collective dissipator (s^-1)."""
    return collective_dissipator(rho.domains).apply(rho, reservoir)


def observables(rho: BlockedDensityMatrix) -> ObservableRecord:
    """
    Expectation values of the reported observables.

    Raises:
        NumericalCorruptionError: If any expectation value has an imaginary
            part above 1e-10 or is not finite
    """
    n1, n2 = rho.domains.n1, rho.domains.n2
    totals = dict.fromkeys(OBSERVABLES, 0j)

    for two_M, block in rho.blocks.items():
        if not np.any(block):
            continue
        basis = magnetization_block(n1, n2, two_M)
        diagonal = np.diag(block)
        populations = np.sum(diagonal)
        totals["trace"] += populations
        totals["jz1"] += np.dot(basis.m1, diagonal)
        totals["jz2"] += np.dot(basis.m2, diagonal)
        totals["jz1jz2"] += np.dot(basis.m1 * basis.m2, diagonal)
        # tr(A rho) = sum_ij A_ij rho_ji
        totals["a12"] += flip_flop_block(n1, n2, two_M).multiply(block.T).sum()
        if two_M > -rho.domains.two_M_max:
            lower = lowering_map(n1, n2, two_M)
            totals["jtot2"] += np.sum((lower.T @ lower).multiply(block.T))
        M = two_M / 2.0
        totals["jtot2"] += (M * M - M) * populations

    values = {}
    for name, value in totals.items():
        value = complex(value)
        if not np.isfinite(value.real) or abs(value.imag) > IMAGINARY_RESIDUE_LIMIT:
            raise NumericalCorruptionError(f"Observable '{name}' is corrupted: {value}")
        values[name] = value.real
    return ObservableRecord(**values)


# ========================================
# Solver
# ========================================

class ExactSolverConfig(SolverConfig):
    """Configuration for the exact Lindblad solver."""
    stepper: Literal["RK45", "DOP853"] = Field(default="RK45", description="Embedded explicit Runge-Kutta pair")
    rtol: float = Field(default=1e-8, gt=0.0, description="Relative tolerance")
    atol: float = Field(default=1e-10, gt=0.0, description="Absolute tolerance")
    first_step_scale: float = Field(
        default=1e-3, gt=0.0,
        description="Initial step is first_step_scale / (gamma (N1+N2+1)(2n+1))"
    )
    coherence_cutoff: Optional[int] = Field(
        default=None, ge=OBSERVABLE_SECTOR_OFFSET,
        description="Largest |J - J'| carried; None chooses automatically"
    )
    full_frame_max_elements: int = Field(
        default=60_000, ge=1,
        description="Automatic mode keeps every chain up to this many elements"
    )
    positivity_tolerance: float = Field(default=1e-8, ge=0.0, description="Eigenvalue floor before warning")
    positivity_seed: int = Field(default=0, description="Seed of the block picked for positivity checks")


@register_solver(
    method="exact",
    config_class=ExactSolverConfig,
    description="Exact collective master equation in the magnetization-block representation"
)
class LindbladSolver(Solver[ExactSolverConfig, BlockedDensityMatrix]):
    """
    Integrates the master equation exactly for moderate domain sizes.

    Blocks are rotated into the coupled |J, M> frame where the generator is
    a sparse tridiagonal matrix; observables are linear functionals of the
    chain vector.
    """

    method = "exact"

    def __init__(self, config: Optional[ExactSolverConfig] = None):
        super().__init__(
            name="lindblad",
            description="Exact Lindblad evolution over magnetization blocks",
            config=config
        )

    @classmethod
    def _get_config_class(cls) -> Type[ExactSolverConfig]:
        return ExactSolverConfig

    def initial_state(self, domains: DomainPair, config: InitialConfig) -> BlockedDensityMatrix:
        return build_initial(config, domains)

    def coherence_cutoff(self, domains: DomainPair) -> Optional[int]:
        """Sector offset limit used for a domain pair."""
        if self.config.coherence_cutoff is not None:
            return self.config.coherence_cutoff
        if chain_element_count(domains.n1, domains.n2) <= self.config.full_frame_max_elements:
            return None
        return OBSERVABLE_SECTOR_OFFSET

    def _evolve(
        self,
        state: BlockedDensityMatrix,
        domains: DomainPair,
        reservoir: ReservoirSpec,
        grid: SamplingGrid,
        criterion: Optional[SteadyStateCriterion]
    ) -> TimeSeries:
        if state.domains != domains:
            raise ContractViolationError(
                f"State for N=({state.domains.n1}, {state.domains.n2}) does not match N=({domains.n1}, {domains.n2})"
            )

        cutoff = self.coherence_cutoff(domains)
        frame = sector_frame(domains.n1, domains.n2, cutoff)
        generator = frame.generator(reservoir)
        weights = frame.observable_weights()
        weight_matrix = np.vstack([weights[name] for name in OBSERVABLES])
        spin_weights = weight_matrix[[OBSERVABLES.index("jz1"), OBSERVABLES.index("jz2")]]

        gamma = reservoir.damping_rate
        nbar = reservoir.thermal_occupation
        tau_grid = grid.times_s() * gamma
        y0 = frame.to_chains(state.blocks)
        magnetizations = np.array(frame.magnetizations)
        rng = np.random.default_rng(self.config.positivity_seed)
        probe = "block_eigenvalue" if frame.is_complete else "sector_population"

        samples = []
        derivatives = []
        positivity = []
        coherence = []
        qualifying = 0
        limit = criterion.threshold(gamma, domains.n1, domains.n2) if criterion else 0.0

        def on_sample(index: int, tau: float, y: np.ndarray) -> bool:
            nonlocal qualifying
            values = weight_matrix @ y.real
            if not np.all(np.isfinite(values)):
                raise NumericalCorruptionError(
                    f"Non-finite observables at t={tau / gamma:g} s", last_good_time_s=tau / gamma
                )
            rates = (spin_weights @ (generator @ y).real) * gamma
            samples.append(values)
            derivatives.append(rates)

            block = frame.frame_block(y, int(rng.choice(magnetizations)))
            if frame.is_complete:
                smallest = float(np.linalg.eigvalsh(block)[0])
            else:
                smallest = float(np.min(np.diag(block).real))
            if smallest < -self.config.positivity_tolerance:
                logger.warning(f"Positivity dip {smallest:.3e} at t={tau / gamma:g} s")
            positivity.append(smallest)
            coherence.append(frame.max_coherence(y))

            if criterion is None:
                return False
            qualifying = qualifying + 1 if np.all(np.abs(rates) < limit) else 0
            return qualifying >= criterion.window

        first_step = self.config.first_step_scale / ((domains.n_total + 1) * (2.0 * nbar + 1.0))
        stepper_class = STEPPERS[self.config.stepper]
        solver = stepper_class(
            lambda t, y: generator @ y,
            0.0,
            y0,
            tau_grid[-1],
            rtol=self.config.rtol,
            atol=self.config.atol,
            first_step=min(first_step, tau_grid[-1])
        )
        stepper = SampledStepper(seconds_per_unit=1.0 / gamma)
        last = stepper.run(solver, tau_grid, on_sample)
        converged = criterion is not None and qualifying >= criterion.window

        values = np.array(samples)
        rates = np.array(derivatives)
        times = grid.times_s()[:last + 1]
        column = {name: values[:, i] for i, name in enumerate(OBSERVABLES)}
        logger.info(
            f"Exact run N=({domains.n1}, {domains.n2}) finished at t={times[-1]:g} s after "
            f"{stepper.steps} steps (converged={converged}, chains={len(frame.chains)})"
        )
        return TimeSeries(
            times_s=times,
            jz1=column["jz1"],
            jz2=column["jz2"],
            a12=column["a12"],
            jz1jz2=column["jz1jz2"],
            trace=column["trace"],
            jtot2=column["jtot2"],
            djz1_dt=rates[:, 0],
            djz2_dt=rates[:, 1],
            min_eigenvalue=np.array(positivity),
            method=self.method,
            converged=converged,
            metadata={
                "n1": domains.n1,
                "n2": domains.n2,
                "gamma_per_s": gamma,
                "nbar": nbar,
                "temperature_k": reservoir.temperature_k,
                "frame": "rotating",
                "stepper": self.config.stepper,
                "steps": stepper.steps,
                "t_star_s": float(times[-1]) if converged else None,
                "coherence_cutoff": cutoff,
                "chain_elements": frame.size,
                "positivity_probe": probe,
                "max_sector_coherence": np.array(coherence),
            },
        )


def evolve(
    rho0: BlockedDensityMatrix,
    reservoir: ReservoirSpec,
    t_max_s: float,
    sampling: int = 401,
    criterion: Optional[SteadyStateCriterion] = SteadyStateCriterion(),
    config: Optional[ExactSolverConfig] = None
) -> TimeSeries:
    """Evolve a blocked state over ``sampling`` uniform samples up to ``t_max_s``."""
    solver = LindbladSolver(config)
    grid = SamplingGrid(t_max_s=t_max_s, sample_count=sampling)
    return solver.evolve(rho0, rho0.domains, reservoir, grid, criterion)
