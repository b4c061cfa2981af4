"""
Collective spin (Dicke) basis arithmetic for two spin domains.

Half-integer quantum numbers are carried as twice-value integers
(``two_j``, ``two_m``) so basis indexing never depends on float equality.
A product state |j1 m1> (x) |j2 m2> is addressed by its excitation counts
e_a = j_a + m_a; states with the same total magnetization M form a block
ordered by m1 descending.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
import logging
import math
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sparse

from domain_relaxation.core.registry import register_exception

logger = logging.getLogger(__name__)

HalfInteger = Union[int, float, Fraction, str]


@register_exception
class SpinDomainError(ValueError):
    """Raised for quantum numbers outside their allowed half-integer range."""
    pass


class Direction(str, Enum):
    """Ladder operator direction."""
    RAISE = "raise"
    LOWER = "lower"


def to_twice(value: HalfInteger) -> int:
    """
    Convert a half-integer to its exact twice-value.

    Accepts ints, floats with exact binary halves, Fractions and strings
    such as "3/2" or "-0.5".

    Raises:
        SpinDomainError: If the value is not a half-integer
    """
    if isinstance(value, bool):
        raise SpinDomainError(f"{value!r} is not a half-integer")
    try:
        exact = value if isinstance(value, Fraction) else Fraction(str(value))
    except (ValueError, ZeroDivisionError) as e:
        raise SpinDomainError(f"Cannot interpret {value!r} as a half-integer") from e
    twice = exact * 2
    if twice.denominator != 1:
        raise SpinDomainError(f"{value!r} is not a half-integer")
    return int(twice)


def half(twice: int) -> Fraction:
    """Exact value of a twice-value integer."""
    return Fraction(twice, 2)


def check_projection(two_j: int, two_m: int) -> None:
    """
    Validate a (j, m) pair given as twice-values.

    Raises:
        SpinDomainError: If j < 0, |m| > j or j - m is not an integer
    """
    if two_j < 0:
        raise SpinDomainError(f"Spin magnitude j={half(two_j)} is negative")
    if abs(two_m) > two_j:
        raise SpinDomainError(f"|m|={abs(half(two_m))} exceeds j={half(two_j)}")
    if (two_j - two_m) % 2:
        raise SpinDomainError(f"j - m must be an integer (j={half(two_j)}, m={half(two_m)})")


def ladder_element(j: HalfInteger, m: HalfInteger, direction: Union[Direction, str]) -> float:
    """
    Matrix element <j, m+-1 | J^+- | j, m> = sqrt(j(j+1) - m(m+-1)).

    Exact zero at the top (raise) and bottom (lower) of the ladder.

    Raises:
        SpinDomainError: For a non-half-integer pair or |m| > j
    """
    two_j, two_m = to_twice(j), to_twice(m)
    check_projection(two_j, two_m)
    if Direction(direction) is Direction.RAISE:
        numerator = (two_j - two_m) * (two_j + two_m + 2)
    else:
        numerator = (two_j + two_m) * (two_j - two_m + 2)
    return math.sqrt(numerator / 4)


def lowering_amplitudes(n_spins: int, excitations: np.ndarray) -> np.ndarray:
    """J^- elements sqrt(e (N - e + 1)) from excitation counts e of a domain."""
    e = np.asarray(excitations, dtype=float)
    return np.sqrt(e * (n_spins - e + 1))


def raising_amplitudes(n_spins: int, excitations: np.ndarray) -> np.ndarray:
    """J^+ elements sqrt((N - e)(e + 1)) from excitation counts e of a domain."""
    e = np.asarray(excitations, dtype=float)
    return np.sqrt((n_spins - e) * (e + 1))


@dataclass(frozen=True)
class SpinDomain:
    """A collective spin of ``n_spins`` spin-1/2 particles, j = n_spins / 2."""

    n_spins: int

    def __post_init__(self):
        if isinstance(self.n_spins, bool) or not isinstance(self.n_spins, (int, np.integer)):
            raise SpinDomainError(f"n_spins must be an integer, got {self.n_spins!r}")
        if self.n_spins < 0:
            raise SpinDomainError(f"n_spins must be non-negative, got {self.n_spins}")
        object.__setattr__(self, "n_spins", int(self.n_spins))

    @property
    def two_j(self) -> int:
        return self.n_spins

    @property
    def j(self) -> Fraction:
        return half(self.n_spins)

    @property
    def dimension(self) -> int:
        return self.n_spins + 1

    @property
    def is_absent(self) -> bool:
        return self.n_spins == 0

    def two_m_values(self) -> List[int]:
        """Twice-values of m, descending."""
        return list(range(self.n_spins, -self.n_spins - 1, -2))


@dataclass(frozen=True)
class DomainPair:
    """The two domains sharing the reservoir."""

    first: SpinDomain
    second: SpinDomain

    @classmethod
    def of(cls, n1: int, n2: int) -> "DomainPair":
        return cls(SpinDomain(n1), SpinDomain(n2))

    @property
    def n1(self) -> int:
        return self.first.n_spins

    @property
    def n2(self) -> int:
        return self.second.n_spins

    @property
    def n_total(self) -> int:
        return self.n1 + self.n2

    @property
    def two_M_max(self) -> int:
        return self.n1 + self.n2

    @property
    def product_dimension(self) -> int:
        return self.first.dimension * self.second.dimension

    def two_M_values(self) -> List[int]:
        """Twice-values of the total magnetization, descending."""
        return list(range(self.two_M_max, -self.two_M_max - 1, -2))

    def swapped(self) -> "DomainPair":
        return DomainPair(self.second, self.first)


@dataclass(frozen=True)
class ProductBasisIndex:
    """A product basis state |j1 m1> (x) |j2 m2> by twice-values of m1, m2."""

    two_m1: int
    two_m2: int

    @classmethod
    def of(cls, m1: HalfInteger, m2: HalfInteger) -> "ProductBasisIndex":
        return cls(to_twice(m1), to_twice(m2))

    @property
    def m1(self) -> Fraction:
        return half(self.two_m1)

    @property
    def m2(self) -> Fraction:
        return half(self.two_m2)

    @property
    def two_M(self) -> int:
        return self.two_m1 + self.two_m2

    @property
    def M(self) -> Fraction:
        return half(self.two_M)

    def validate(self, domains: DomainPair) -> None:
        """Raises SpinDomainError when either projection is out of range."""
        check_projection(domains.n1, self.two_m1)
        check_projection(domains.n2, self.two_m2)


@dataclass(frozen=True, eq=False)
class MagnetizationBlock:
    """
    Product states of fixed total magnetization, ordered by m1 descending.

    Arrays are read-only; position i holds excitation counts (e1[i], e2[i]).
    """

    n1: int
    n2: int
    two_M: int
    e1: np.ndarray
    e2: np.ndarray

    @property
    def dimension(self) -> int:
        return int(self.e1.size)

    @property
    def two_m1(self) -> np.ndarray:
        return 2 * self.e1 - self.n1

    @property
    def two_m2(self) -> np.ndarray:
        return 2 * self.e2 - self.n2

    @property
    def m1(self) -> np.ndarray:
        return self.two_m1 / 2.0

    @property
    def m2(self) -> np.ndarray:
        return self.two_m2 / 2.0

    @property
    def excitations(self) -> int:
        return (self.two_M + self.n1 + self.n2) // 2

    def index_of(self, two_m1: int) -> int:
        """Position of the state with the given 2*m1 inside the block."""
        e1 = (two_m1 + self.n1) // 2
        position = int(self.e1[0]) - e1
        if (two_m1 + self.n1) % 2 or not 0 <= position < self.dimension:
            raise SpinDomainError(f"m1={half(two_m1)} is not in block M={half(self.two_M)}")
        return position

    def basis_indices(self) -> List[ProductBasisIndex]:
        return [ProductBasisIndex(int(a), int(b)) for a, b in zip(self.two_m1, self.two_m2)]


@lru_cache(maxsize=8192)
def magnetization_block(n1: int, n2: int, two_M: int) -> MagnetizationBlock:
    """
    The block of total magnetization M = two_M / 2.

    Raises:
        SpinDomainError: If M is not reachable for the domain pair
    """
    total = n1 + n2
    if abs(two_M) > total or (total - two_M) % 2:
        raise SpinDomainError(f"M={half(two_M)} is not a magnetization of N=({n1}, {n2})")
    excitations = (two_M + total) // 2
    e1 = np.arange(min(n1, excitations), max(0, excitations - n2) - 1, -1)
    e2 = excitations - e1
    e1.setflags(write=False)
    e2.setflags(write=False)
    return MagnetizationBlock(n1, n2, two_M, e1, e2)


@lru_cache(maxsize=8192)
def domain_lowering_maps(n1: int, n2: int, two_M: int) -> Tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """
    J1^- and J2^- as sparse maps from block M to block M-1.

    Raises:
        SpinDomainError: At the bottom block, which has no lower neighbour
    """
    if two_M <= -(n1 + n2):
        raise SpinDomainError(f"Block M={half(two_M)} has no lower neighbour")
    source = magnetization_block(n1, n2, two_M)
    target = magnetization_block(n1, n2, two_M - 2)
    top = int(target.e1[0])
    columns = np.arange(source.dimension)
    shape = (target.dimension, source.dimension)

    first = source.e1 >= 1
    map1 = sparse.coo_matrix(
        (lowering_amplitudes(n1, source.e1[first]), (top - (source.e1[first] - 1), columns[first])),
        shape=shape
    ).tocsr()

    second = source.e2 >= 1
    map2 = sparse.coo_matrix(
        (lowering_amplitudes(n2, source.e2[second]), (top - source.e1[second], columns[second])),
        shape=shape
    ).tocsr()
    return map1, map2


@lru_cache(maxsize=8192)
def lowering_map(n1: int, n2: int, two_M: int) -> sparse.csr_matrix:
    """J_tot^- = J1^- + J2^- from block M to block M-1."""
    map1, map2 = domain_lowering_maps(n1, n2, two_M)
    return (map1 + map2).tocsr()


def flip_flop_block(n1: int, n2: int, two_M: int) -> sparse.csr_matrix:
    """A12 = J1^+ J2^- + J1^- J2^+ restricted to block M (symmetric tridiagonal)."""
    block = magnetization_block(n1, n2, two_M)
    if block.dimension == 1:
        return sparse.csr_matrix((1, 1))
    off = flip_flop_couplings(block)
    return sparse.diags([off, off], [-1, 1], shape=(block.dimension, block.dimension), format="csr")


def flip_flop_couplings(block: MagnetizationBlock) -> np.ndarray:
    """
    <i| J1^+ J2^- |i+1> for neighbouring block positions.

    Position i+1 holds (e1 - 1, e2 + 1); the flip-flop moves one excitation
    from domain 2 back to domain 1.
    """
    e1 = block.e1[:-1]
    e2 = block.e2[:-1]
    return raising_amplitudes(block.n1, e1 - 1) * lowering_amplitudes(block.n2, e2 + 1)


def apply_collective_lower(domains: DomainPair, two_M: int, amplitudes: np.ndarray) -> np.ndarray:
    """
    Apply J_tot^- to a state block (vector or matrix of rows) at magnetization M.

    The result is indexed at M-1. At the bottom block M = -(j1+j2) there is
    no target block: the result has zero rows.

    Returns:
        Array of shape (d_{M-1},) + amplitudes.shape[1:]. At the bottom block
        d_{M-1} is 0, so callers that sum or stack results need no special case
        but callers that index row 0 must check ``result.shape[0]`` first.

    Raises:
        SpinDomainError: If the input does not match the block dimension
    """
    data = np.asarray(amplitudes)
    block = magnetization_block(domains.n1, domains.n2, two_M)
    if data.shape[0] != block.dimension:
        raise SpinDomainError(
            f"Block M={half(two_M)} has dimension {block.dimension}, got {data.shape[0]} rows"
        )
    if two_M == -domains.two_M_max:
        return np.zeros((0,) + data.shape[1:], dtype=np.result_type(data, float))
    return lowering_map(domains.n1, domains.n2, two_M) @ data


class CollectiveOperators(NamedTuple):
    """Collective operators on the full product space in block order."""
    j1z: sparse.csr_matrix
    j2z: sparse.csr_matrix
    j1_lower: sparse.csr_matrix
    j2_lower: sparse.csr_matrix
    offsets: Dict[int, int]

    @property
    def jz(self) -> sparse.csr_matrix:
        return (self.j1z + self.j2z).tocsr()

    @property
    def lower(self) -> sparse.csr_matrix:
        return (self.j1_lower + self.j2_lower).tocsr()

    @property
    def raising(self) -> sparse.csr_matrix:
        return self.lower.T.tocsr()

    def total_spin_squared(self) -> sparse.csr_matrix:
        """J_tot^2 = J+J- + Jz^2 - Jz."""
        jz = self.jz
        return (self.raising @ self.lower + jz @ jz - jz).tocsr()

    def flip_flop(self) -> sparse.csr_matrix:
        """A12 = J1^+ J2^- + J1^- J2^+."""
        hop = self.j1_lower.T @ self.j2_lower
        return (hop + hop.T).tocsr()


def block_offsets(domains: DomainPair) -> Dict[int, int]:
    """Start of each M-block in the full product space (blocks by M descending)."""
    offsets: Dict[int, int] = {}
    position = 0
    for two_M in domains.two_M_values():
        offsets[two_M] = position
        position += magnetization_block(domains.n1, domains.n2, two_M).dimension
    return offsets


def collective_operators(domains: DomainPair) -> CollectiveOperators:
    """
    Build the collective operators from ladder elements on the full space.

    The full space concatenates the M-blocks from the top magnetization down.
    """
    n1, n2 = domains.n1, domains.n2
    offsets = block_offsets(domains)
    size = domains.product_dimension

    m1_diag = np.empty(size)
    m2_diag = np.empty(size)
    rows1: List[np.ndarray] = []
    cols1: List[np.ndarray] = []
    vals1: List[np.ndarray] = []
    rows2: List[np.ndarray] = []
    cols2: List[np.ndarray] = []
    vals2: List[np.ndarray] = []

    for two_M, start in offsets.items():
        block = magnetization_block(n1, n2, two_M)
        m1_diag[start:start + block.dimension] = block.m1
        m2_diag[start:start + block.dimension] = block.m2
        if two_M == -domains.two_M_max:
            continue
        map1, map2 = domain_lowering_maps(n1, n2, two_M)
        target = offsets[two_M - 2]
        for coo, rows, cols, vals in ((map1.tocoo(), rows1, cols1, vals1), (map2.tocoo(), rows2, cols2, vals2)):
            rows.append(coo.row + target)
            cols.append(coo.col + start)
            vals.append(coo.data)

    def assemble(rows, cols, vals) -> sparse.csr_matrix:
        if not vals:
            return sparse.csr_matrix((size, size))
        return sparse.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size)
        ).tocsr()

    return CollectiveOperators(
        j1z=sparse.diags(m1_diag, format="csr"),
        j2z=sparse.diags(m2_diag, format="csr"),
        j1_lower=assemble(rows1, cols1, vals1),
        j2_lower=assemble(rows2, cols2, vals2),
        offsets=offsets,
    )


def product_state_position(domains: DomainPair, index: ProductBasisIndex) -> Tuple[int, int]:
    """(two_M, position inside the block) of a product basis state."""
    index.validate(domains)
    block = magnetization_block(domains.n1, domains.n2, index.two_M)
    return index.two_M, block.index_of(index.two_m1)


def full_index(domains: DomainPair, index: ProductBasisIndex, offsets: Optional[Dict[int, int]] = None) -> int:
    """Position of a product state in the full block-ordered space."""
    offsets = offsets or block_offsets(domains)
    two_M, position = product_state_position(domains, index)
    return offsets[two_M] + position
