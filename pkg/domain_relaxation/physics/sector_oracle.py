"""
Steady states from the total-spin sector decomposition.

The collective jump operators commute with J_tot^2, so the weight of each
sector J in the initial state never changes. At T = 0 every sector decays
to its bottom state |J, -J>; at T > 0 it thermalizes to a Gibbs ladder
over M. Single-domain polarizations inside a sector follow from the
projection theorem.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy import constants
from scipy.optimize import brentq
from scipy.special import logsumexp

from domain_relaxation.physics.clebsch_gordan import block_eigenbasis
from domain_relaxation.physics.initial_config import InitialConfig, UnsupportedInputError
from domain_relaxation.physics.reservoir import ReservoirSpec
from domain_relaxation.physics.spin_algebra import (
    DomainPair,
    HalfInteger,
    SpinDomainError,
    half,
    magnetization_block,
    to_twice
)

logger = logging.getLogger(__name__)

# Sector weights below this are dropped from decompositions.
NEGLIGIBLE_WEIGHT = 1e-15

__all__ = [
    "Domain",
    "SectorWeight",
    "SectorDecomposition",
    "SectorSteadyState",
    "SteadyStatePrediction",
    "UnsupportedInputError",
    "decompose",
    "sector_jz",
    "sector_jz_exact",
    "steady_state",
    "effective_inverse_temperature",
    "effective_temperature_k",
]


class Domain(str, Enum):
    FIRST = "domain1"
    SECOND = "domain2"


@dataclass(frozen=True)
class SectorWeight:
    two_J: int
    probability: float
    exact: Optional[Fraction] = None

    @property
    def J(self) -> Fraction:
        return half(self.two_J)


@dataclass(frozen=True)
class SectorDecomposition:
    """Sector weights p_J of a product state |j1 m1> (x) |j2 m2>."""
    n1: int
    n2: int
    two_m1: int
    two_m2: int
    weights: Tuple[SectorWeight, ...]

    @property
    def two_M(self) -> int:
        return self.two_m1 + self.two_m2

    @property
    def total_weight(self) -> float:
        return float(sum(w.probability for w in self.weights))

    def weight(self, two_J: int) -> float:
        for w in self.weights:
            if w.two_J == two_J:
                return w.probability
        return 0.0


@dataclass(frozen=True)
class SectorSteadyState:
    two_J: int
    probability: float
    jz1: float
    jz2: float


@dataclass(frozen=True)
class SteadyStatePrediction:
    """Composed steady values with their per-sector rows."""
    jz1: float
    jz2: float
    sectors: Tuple[SectorSteadyState, ...]
    thermal_occupation: float

    @property
    def jz_sum(self) -> float:
        return self.jz1 + self.jz2


def _two_level_weights(n_big: int, two_m_big: int, two_m_small: int) -> List[SectorWeight]:
    """
    Exact weights when one domain is a single spin-1/2.

    |<j+1/2, M | j m; 1/2 +-1/2>|^2 = (j +- M + 1/2) / (2j + 1).
    """
    two_M = two_m_big + two_m_small
    if two_m_small > 0:
        upper = Fraction(n_big + two_M + 1, 2 * (n_big + 1))
    else:
        upper = Fraction(n_big - two_M + 1, 2 * (n_big + 1))
    weights = [SectorWeight(n_big + 1, float(upper), upper)]
    if n_big >= 1 and upper != 1:
        lower = 1 - upper
        weights.insert(0, SectorWeight(n_big - 1, float(lower), lower))
    return weights


def decompose(domains: DomainPair, config: InitialConfig) -> SectorDecomposition:
    """
    Decompose a product initial state into total-spin sectors.

    Uses the closed form when either domain is a single spin and the block
    eigenbasis of J_tot^2 otherwise.

    Raises:
        UnsupportedInputError: For a non-product configuration
        SpinDomainError: If the configuration does not fit the domains
    """
    index = config.product_index(domains)
    n1, n2 = domains.n1, domains.n2
    two_M = index.two_M

    if n1 == 0 or n2 == 0:
        weights = [SectorWeight(n1 + n2, 1.0, Fraction(1))]
    elif n2 == 1:
        weights = _two_level_weights(n1, index.two_m1, index.two_m2)
    elif n1 == 1:
        weights = _two_level_weights(n2, index.two_m2, index.two_m1)
    else:
        two_J, vectors = block_eigenbasis(n1, n2, two_M)
        row = magnetization_block(n1, n2, two_M).index_of(index.two_m1)
        probabilities = vectors[row, :] ** 2
        weights = [
            SectorWeight(int(tj), float(p))
            for tj, p in zip(two_J, probabilities)
            if p > NEGLIGIBLE_WEIGHT
        ]

    decomposition = SectorDecomposition(n1, n2, index.two_m1, index.two_m2, tuple(weights))
    logger.debug(
        f"Sector decomposition of N=({n1}, {n2}), m=({half(index.two_m1)}, {half(index.two_m2)}): "
        + ", ".join(f"J={w.J}: {w.probability:.6g}" for w in weights)
    )
    return decomposition


def _projection_factor(two_J: int, two_j_self: int, two_j_other: int) -> Fraction:
    """[J(J+1) + j_a(j_a+1) - j_b(j_b+1)] / (2 J(J+1)); 0 for J = 0."""
    if two_J == 0:
        return Fraction(0)
    numerator = two_J * (two_J + 2) + two_j_self * (two_j_self + 2) - two_j_other * (two_j_other + 2)
    return Fraction(numerator, 2 * two_J * (two_J + 2))


def sector_jz_exact(two_J: int, two_M: int, two_j1: int, two_j2: int, which: Domain) -> Fraction:
    """
    <J, M | J_a^z | J, M> as an exact fraction from twice-values.

    Raises:
        SpinDomainError: If J violates the triangle rule or |M| > J
    """
    if not abs(two_j1 - two_j2) <= two_J <= two_j1 + two_j2 or (two_j1 + two_j2 - two_J) % 2:
        raise SpinDomainError(f"J={half(two_J)} violates the triangle rule for j1={half(two_j1)}, j2={half(two_j2)}")
    if abs(two_M) > two_J or (two_J - two_M) % 2:
        raise SpinDomainError(f"M={half(two_M)} is not a projection of J={half(two_J)}")
    if Domain(which) is Domain.FIRST:
        factor = _projection_factor(two_J, two_j1, two_j2)
    else:
        factor = _projection_factor(two_J, two_j2, two_j1)
    return half(two_M) * factor


def sector_jz(
    J: HalfInteger,
    M: HalfInteger,
    j1: HalfInteger,
    j2: HalfInteger,
    which: Domain
) -> float:
    """Projection-theorem polarization of one domain inside |J, M>."""
    return float(sector_jz_exact(to_twice(J), to_twice(M), to_twice(j1), to_twice(j2), which))


def _ladder_mean_two_M(two_J: int, boltzmann_factor: float) -> float:
    """Gibbs mean of 2M over M = -J..J with weights r^(M+J)."""
    if two_J == 0:
        return 0.0
    if boltzmann_factor == 0.0:
        return float(-two_J)
    steps = np.arange(two_J + 1, dtype=float)
    log_weights = steps * math.log(boltzmann_factor)
    weights = np.exp(log_weights - logsumexp(log_weights))
    return float(np.dot(weights, 2.0 * steps - two_J))


def steady_state(domains: DomainPair, config: InitialConfig, reservoir: ReservoirSpec) -> SteadyStatePrediction:
    """
    Steady-state polarizations of both domains.

    T = 0: each sector ends in |J, -J>. T > 0: each sector ends in the Gibbs
    ladder w_M ∝ exp(-hbar omega M / k T); polarizations are linear in M
    inside a sector, so only the mean M is needed.

    Raises:
        UnsupportedInputError: For a non-product configuration
    """
    decomposition = decompose(domains, config)
    ratio = reservoir.boltzmann_factor
    n1, n2 = domains.n1, domains.n2

    rows = []
    for weight in decomposition.weights:
        two_J = weight.two_J
        mean_M = _ladder_mean_two_M(two_J, ratio) / 2.0
        jz1 = float(_projection_factor(two_J, n1, n2)) * mean_M
        jz2 = float(_projection_factor(two_J, n2, n1)) * mean_M
        rows.append(SectorSteadyState(two_J, weight.probability, jz1, jz2))

    jz1_ss = float(sum(r.probability * r.jz1 for r in rows))
    jz2_ss = float(sum(r.probability * r.jz2 for r in rows))
    return SteadyStatePrediction(jz1_ss, jz2_ss, tuple(rows), reservoir.thermal_occupation)


def _ladder_mean_m(two_j: int, x: float) -> float:
    """Gibbs mean of m for a single ladder with weights exp(-x m)."""
    two_m = np.arange(-two_j, two_j + 1, 2, dtype=float)
    log_weights = -x * two_m / 2.0
    weights = np.exp(log_weights - logsumexp(log_weights))
    return float(np.dot(weights, two_m / 2.0))


def effective_inverse_temperature(jz: float, n_spins: int) -> float:
    """
    x = hbar omega / k T_eff of the single-domain Gibbs ladder with mean jz.

    Returns +inf at the ground state, -inf at the fully excited state and 0
    for jz = 0.

    Raises:
        SpinDomainError: For an absent domain
    """
    if n_spins <= 0:
        raise SpinDomainError("An absent domain has no spin temperature")
    j = n_spins / 2.0
    if jz <= -j:
        return math.inf
    if jz >= j:
        return -math.inf
    if jz == 0.0:
        return 0.0

    def gap(x: float) -> float:
        return _ladder_mean_m(n_spins, x) - jz

    bound = 1.0
    while gap(bound) > 0 or gap(-bound) < 0:
        bound *= 2.0
        if bound > 1e6:
            return math.inf if jz < 0 else -math.inf
    return float(brentq(gap, -bound, bound, xtol=1e-14, rtol=1e-12))


def effective_temperature_k(jz: float, n_spins: int, spin_frequency_hz: float) -> float:
    """
    Temperature at which a single collective-spin ladder has mean ``jz``.

    Negative for jz > 0 (population inversion); +inf at jz = 0.
    """
    x = effective_inverse_temperature(jz, n_spins)
    if x == 0.0:
        return math.inf
    energy = constants.hbar * 2.0 * math.pi * spin_frequency_hz
    return energy / (constants.k * x)
