"""
Four-moment closure of the collective relaxation.

The state is (<J1z>, <J2z>, <A12>, <J1z J2z>) with A12 = J1+ J2- + J1- J2+.
Third-order moments are factorized, which makes the flow a quadratic
polynomial map. Integration runs in tau = gamma t with k = 2n + 1:

    d jz_a / d tau = -2k jz_a + (-N_a(N_a+2) + 4 jz_a^2 - 2 a) / 2
    d a / d tau    = -2k (a - 4p) + 2 (jz1 + jz2)(a - 2p) + N2(N2+2) jz1 + N1(N1+2) jz2
    d p / d tau    = -(d a / d tau) / 2

so a + 2p (twice <J1 . J2> minus a constant) is conserved.
"""

from dataclasses import dataclass
import logging
from typing import List, Optional, Type

import numpy as np
from pydantic import Field
from scipy.integrate import OdeSolver
from typing_extensions import Literal

from domain_relaxation.core.base_models import SolverConfig
from domain_relaxation.core.registry import register_solver
from domain_relaxation.core.sampling import SamplingGrid, SteadyStateCriterion
from domain_relaxation.core.solver import Solver
from domain_relaxation.core.stepping import STEPPERS, SampledStepper
from domain_relaxation.core.time_series import TimeSeries
from domain_relaxation.physics.clebsch_gordan import coupled_state_vector
from domain_relaxation.physics.initial_config import InitialConfig
from domain_relaxation.physics.reservoir import ReservoirSpec
from domain_relaxation.physics.spin_algebra import DomainPair, flip_flop_block, magnetization_block

logger = logging.getLogger(__name__)

# Integration slack on |jz_a| <= N_a / 2, per spin.
BOUND_SLACK = 1e-6


@dataclass(frozen=True)
class MomentState:
    """Expectation values carried by the closure."""
    jz1: float
    jz2: float
    a12: float
    jz1jz2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.jz1, self.jz2, self.a12, self.jz1jz2], dtype=float)

    @classmethod
    def from_array(cls, values: np.ndarray) -> "MomentState":
        jz1, jz2, a12, jz1jz2 = (float(v) for v in values)
        return cls(jz1, jz2, a12, jz1jz2)

    @property
    def flip_flop_invariant(self) -> float:
        """a12 + 2 jz1jz2, constant along closure trajectories."""
        return self.a12 + 2.0 * self.jz1jz2

    def within_bounds(self, domains: DomainPair) -> bool:
        slack = BOUND_SLACK * max(domains.n_total, 1)
        return (
            abs(self.jz1) <= domains.n1 / 2.0 + slack
            and abs(self.jz2) <= domains.n2 / 2.0 + slack
        )


def _flow(y: np.ndarray, n1: int, n2: int, k: float) -> np.ndarray:
    jz1, jz2, a, p = y
    djz1 = -2.0 * k * jz1 + 0.5 * (-n1 * (n1 + 2) + 4.0 * jz1 * jz1 - 2.0 * a)
    djz2 = -2.0 * k * jz2 + 0.5 * (-n2 * (n2 + 2) + 4.0 * jz2 * jz2 - 2.0 * a)
    da = (
        -2.0 * k * (a - 4.0 * p)
        + 2.0 * (jz1 + jz2) * (a - 2.0 * p)
        + n2 * (n2 + 2) * jz1
        + n1 * (n1 + 2) * jz2
    )
    return np.array([djz1, djz2, da, -0.5 * da])


def _flow_jacobian(y: np.ndarray, n1: int, n2: int, k: float) -> np.ndarray:
    jz1, jz2, a, p = y
    coupling = np.array([
        2.0 * (a - 2.0 * p) + n2 * (n2 + 2),
        2.0 * (a - 2.0 * p) + n1 * (n1 + 2),
        -2.0 * k + 2.0 * (jz1 + jz2),
        8.0 * k - 4.0 * (jz1 + jz2),
    ])
    return np.array([
        [-2.0 * k + 4.0 * jz1, 0.0, -1.0, 0.0],
        [0.0, -2.0 * k + 4.0 * jz2, -1.0, 0.0],
        coupling,
        -0.5 * coupling,
    ])


def closure_rhs(state: MomentState, domains: DomainPair, reservoir: ReservoirSpec) -> MomentState:
    """Time derivative of the moments in s^-1."""
    k = 2.0 * reservoir.thermal_occupation + 1.0
    rates = _flow(state.as_array(), domains.n1, domains.n2, k) * reservoir.damping_rate
    return MomentState.from_array(rates)


def closure_jacobian(state: MomentState, domains: DomainPair, reservoir: ReservoirSpec) -> np.ndarray:
    """Analytic Jacobian of ``closure_rhs`` (rows d/dt, columns moments), in s^-1."""
    k = 2.0 * reservoir.thermal_occupation + 1.0
    return _flow_jacobian(state.as_array(), domains.n1, domains.n2, k) * reservoir.damping_rate


def initial_moments(config: InitialConfig, domains: DomainPair) -> MomentState:
    """
    Moments of an initial configuration.

    Product states give a12 = 0 and jz1jz2 = m1 m2 exactly; a coupled |J, M>
    state takes its moments from the Clebsch-Gordan vector.

    Raises:
        SpinDomainError: If the configuration does not fit the domains
    """
    if config.is_product:
        index = config.product_index(domains)
        m1, m2 = float(index.m1), float(index.m2)
        return MomentState(m1, m2, 0.0, m1 * m2)

    two_J, two_M = config.coupled_numbers(domains)
    vector = coupled_state_vector(domains.n1, domains.n2, two_J, two_M)
    block = magnetization_block(domains.n1, domains.n2, two_M)
    weights = vector * vector
    a12 = float(vector @ (flip_flop_block(domains.n1, domains.n2, two_M) @ vector))
    return MomentState(
        float(np.dot(block.m1, weights)),
        float(np.dot(block.m2, weights)),
        a12,
        float(np.dot(block.m1 * block.m2, weights)),
    )


class ClosureSolverConfig(SolverConfig):
    """Configuration for the moment-closure solver."""
    stepper: Literal["RK45", "DOP853"] = Field(default="DOP853", description="Explicit stepper")
    stiff_stepper: Literal["Radau", "BDF"] = Field(default="Radau", description="Implicit stepper after the switch")
    rtol: float = Field(default=1e-10, gt=0.0, description="Relative tolerance")
    atol: float = Field(default=1e-10, gt=0.0, description="Absolute tolerance")
    stiffness_threshold: float = Field(
        default=1e3, gt=0.0,
        description="Switch once the Jacobian spectral radius exceeds this times gamma (2n+1)"
    )
    stiffness_check_interval: int = Field(default=20, ge=1, description="Steps between stiffness checks")
    allow_switch: bool = Field(default=True, description="Enable the switch to the implicit stepper")


@register_solver(
    method="closure",
    config_class=ClosureSolverConfig,
    description="Factorized four-moment closure for large domains"
)
class ClosureSolver(Solver[ClosureSolverConfig, MomentState]):
    """
    Integrates the closed moment equations.

    Approximate at small N; the series carries the ``closure`` method tag.
    """

    method = "closure"

    def __init__(self, config: Optional[ClosureSolverConfig] = None):
        super().__init__(
            name="closure",
            description="Moment closure of the collective relaxation",
            config=config
        )

    @classmethod
    def _get_config_class(cls) -> Type[ClosureSolverConfig]:
        return ClosureSolverConfig

    def initial_state(self, domains: DomainPair, config: InitialConfig) -> MomentState:
        return initial_moments(config, domains)

    def _stiffness_switch(self, n1: int, n2: int, k: float, t_bound: float):
        limit = self.config.stiffness_threshold * k
        stiff_class = STEPPERS[self.config.stiff_stepper]

        def jac(t: float, y: np.ndarray) -> np.ndarray:
            return _flow_jacobian(y, n1, n2, k)

        def switch(solver: OdeSolver) -> Optional[OdeSolver]:
            if isinstance(solver, stiff_class):
                return None
            radius = float(np.max(np.abs(np.linalg.eigvals(jac(solver.t, solver.y)))))
            if radius <= limit:
                return None
            logger.info(
                f"Closure spectral radius {radius:.3g} exceeds {limit:.3g} at tau={solver.t:.4g}; "
                f"switching to {self.config.stiff_stepper}"
            )
            return stiff_class(
                solver.fun,
                solver.t,
                solver.y,
                t_bound,
                rtol=self.config.rtol,
                atol=self.config.atol,
                jac=jac
            )

        return switch

    def _evolve(
        self,
        state: MomentState,
        domains: DomainPair,
        reservoir: ReservoirSpec,
        grid: SamplingGrid,
        criterion: Optional[SteadyStateCriterion]
    ) -> TimeSeries:
        n1, n2 = domains.n1, domains.n2
        gamma = reservoir.damping_rate
        nbar = reservoir.thermal_occupation
        k = 2.0 * nbar + 1.0
        tau_grid = grid.times_s() * gamma

        samples: List[np.ndarray] = []
        rates: List[np.ndarray] = []
        violation: List[Optional[float]] = [None]
        qualifying = 0
        limit = criterion.threshold(gamma, n1, n2) if criterion else 0.0

        def on_sample(index: int, tau: float, y: np.ndarray) -> bool:
            nonlocal qualifying
            derivative = _flow(y, n1, n2, k) * gamma
            samples.append(y)
            rates.append(derivative[:2])
            if violation[0] is None and not MomentState.from_array(y).within_bounds(domains):
                violation[0] = tau / gamma
                logger.warning(
                    f"Closure left the physical range at t={tau / gamma:g} s: "
                    f"jz1={y[0]:.6g}, jz2={y[1]:.6g} for N=({n1}, {n2})"
                )
            if criterion is None:
                return False
            qualifying = qualifying + 1 if np.all(np.abs(derivative[:2]) < limit) else 0
            return qualifying >= criterion.window

        solver = STEPPERS[self.config.stepper](
            lambda t, y: _flow(y, n1, n2, k),
            0.0,
            state.as_array(),
            tau_grid[-1],
            rtol=self.config.rtol,
            atol=self.config.atol
        )
        switch = self._stiffness_switch(n1, n2, k, tau_grid[-1]) if self.config.allow_switch else None
        stepper = SampledStepper(
            seconds_per_unit=1.0 / gamma,
            switch=switch,
            switch_interval=self.config.stiffness_check_interval
        )
        last = stepper.run(solver, tau_grid, on_sample)
        converged = criterion is not None and qualifying >= criterion.window

        values = np.array(samples)
        derivatives = np.array(rates)
        times = grid.times_s()[:last + 1]
        invariant = values[:, 2] + 2.0 * values[:, 3]
        logger.info(
            f"Closure run N=({n1}, {n2}) finished at t={times[-1]:g} s after {stepper.steps} steps "
            f"with {' -> '.join(stepper.stepper_names)} (converged={converged})"
        )
        return TimeSeries(
            times_s=times,
            jz1=values[:, 0],
            jz2=values[:, 1],
            a12=values[:, 2],
            jz1jz2=values[:, 3],
            djz1_dt=derivatives[:, 0],
            djz2_dt=derivatives[:, 1],
            method=self.method,
            converged=converged,
            metadata={
                "n1": n1,
                "n2": n2,
                "gamma_per_s": gamma,
                "nbar": nbar,
                "temperature_k": reservoir.temperature_k,
                "stepper": " -> ".join(stepper.stepper_names),
                "stepper_history": list(stepper.history),
                "steps": stepper.steps,
                "t_star_s": float(times[-1]) if converged else None,
                "bounds_violated": violation[0] is not None,
                "first_violation_s": violation[0],
                "invariant_drift": float(np.max(np.abs(invariant - invariant[0]))),
            },
        )


def evolve_closure(
    s0: MomentState,
    domains: DomainPair,
    reservoir: ReservoirSpec,
    t_max_s: float,
    sampling: int = 401,
    criterion: Optional[SteadyStateCriterion] = SteadyStateCriterion(),
    config: Optional[ClosureSolverConfig] = None
) -> TimeSeries:
    """Integrate the closure from ``s0`` over ``sampling`` uniform samples up to ``t_max_s``."""
    solver = ClosureSolver(config)
    grid = SamplingGrid(t_max_s=t_max_s, sample_count=sampling)
    return solver.evolve(s0, domains, reservoir, grid, criterion)
