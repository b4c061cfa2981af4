"""
Clebsch-Gordan coefficients for two coupled collective spins.

Inside a magnetization block the total spin J_tot^2 is a real symmetric
tridiagonal matrix, and its eigenvectors are the coupled states |J, M>.
Phases are fixed by walking the blocks from the top magnetization down:
a new multiplet's highest state gets a positive <j1 j1; j2 J-j1 | J J>
(Condon-Shortley), and every lower state is chosen to overlap positively
with J_tot^- applied to the state above it.
"""

from dataclasses import dataclass
from functools import lru_cache
import logging
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from domain_relaxation.physics.spin_algebra import (
    HalfInteger,
    SpinDomainError,
    flip_flop_couplings,
    half,
    lowering_map,
    magnetization_block,
    to_twice
)

logger = logging.getLogger(__name__)

# Eigenvalue mismatch (relative to the largest J(J+1)) tolerated before a
# block eigenbasis is rejected.
EIGENVALUE_TOLERANCE = 1e-8


def total_spin_tridiagonal(n1: int, n2: int, two_M: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Diagonal and off-diagonal of J_tot^2 on block M.

    J_tot^2 = J1^2 + J2^2 + 2 J1z J2z + A12, with A12 coupling neighbours.
    """
    block = magnetization_block(n1, n2, two_M)
    diagonal = (n1 * (n1 + 2) + n2 * (n2 + 2)) / 4.0 + block.two_m1 * block.two_m2 / 2.0
    return diagonal.astype(float), flip_flop_couplings(block)


def minimum_two_J(n1: int, n2: int, two_M: int) -> int:
    return max(abs(n1 - n2), abs(two_M))


@lru_cache(maxsize=4096)
def block_eigenbasis(n1: int, n2: int, two_M: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Total-spin eigenbasis of block M with arbitrary column signs.

    Returns:
        (two_J ascending, V) where column a of V is |J_a, M> in the block basis

    Raises:
        ArithmeticError: If the eigenvalues do not match J(J+1)
    """
    diagonal, off = total_spin_tridiagonal(n1, n2, two_M)
    dimension = diagonal.size
    two_J = minimum_two_J(n1, n2, two_M) + 2 * np.arange(dimension)

    if dimension == 1:
        eigenvalues, vectors = diagonal.copy(), np.ones((1, 1))
    else:
        eigenvalues, vectors = eigh_tridiagonal(diagonal, off)

    expected = two_J * (two_J + 2) / 4.0
    scale = max(1.0, float(expected[-1]))
    mismatch = float(np.max(np.abs(eigenvalues - expected)))
    if mismatch > EIGENVALUE_TOLERANCE * scale:
        raise ArithmeticError(
            f"J_tot^2 spectrum of block M={half(two_M)} for N=({n1}, {n2}) "
            f"deviates from J(J+1) by {mismatch:.3e}"
        )
    two_J.setflags(write=False)
    vectors.setflags(write=False)
    return two_J, vectors


@dataclass(frozen=True, eq=False)
class CGBlock:
    """Coupled basis of one magnetization block: C[i, a] = <J_a, M | m1_i, m2_i>."""
    two_M: int
    two_J: np.ndarray
    coefficients: np.ndarray

    def column(self, two_J: int) -> int:
        position = (two_J - int(self.two_J[0])) // 2
        if not 0 <= position < self.two_J.size or self.two_J[position] != two_J:
            raise KeyError(f"J={half(two_J)} not present in block M={half(self.two_M)}")
        return position


class CGTable:
    """
    Clebsch-Gordan coefficients of j1 = n1/2 and j2 = n2/2 for every M.

    Args:
        n1: Twice j1 (spin count of domain 1)
        n2: Twice j2 (spin count of domain 2)
    """

    def __init__(self, n1: int, n2: int):
        self.n1 = n1
        self.n2 = n2
        self.blocks: Dict[int, CGBlock] = {}
        self._build()

    def _build(self) -> None:
        total = self.n1 + self.n2
        previous: Optional[CGBlock] = None
        for two_M in range(total, -total - 1, -2):
            two_J, vectors = block_eigenbasis(self.n1, self.n2, two_M)
            vectors = np.array(vectors, copy=True)

            lowered = None
            if previous is not None:
                lowered = lowering_map(self.n1, self.n2, two_M + 2) @ previous.coefficients

            for a, tj in enumerate(two_J):
                if previous is not None and tj in previous.two_J:
                    reference = vectors[:, a] @ lowered[:, previous.column(int(tj))]
                else:
                    # highest state of the multiplet: index 0 holds m1 = j1
                    reference = vectors[0, a]
                if reference < 0:
                    vectors[:, a] *= -1.0

            vectors.setflags(write=False)
            current = CGBlock(two_M=two_M, two_J=two_J, coefficients=vectors)
            self.blocks[two_M] = current
            previous = current
        logger.debug(f"Built Clebsch-Gordan table for N=({self.n1}, {self.n2}): {len(self.blocks)} blocks")

    def coefficient(self, two_J: int, two_M: int, two_m1: int, two_m2: int) -> float:
        """<J, M | j1 m1; j2 m2> from twice-values; 0 outside the selection rules."""
        if two_m1 + two_m2 != two_M or two_M not in self.blocks:
            return 0.0
        if abs(two_m1) > self.n1 or abs(two_m2) > self.n2:
            return 0.0
        block = self.blocks[two_M]
        try:
            column = block.column(two_J)
        except KeyError:
            return 0.0
        row = magnetization_block(self.n1, self.n2, two_M).index_of(two_m1)
        return float(block.coefficients[row, column])

    def orthonormality_error(self) -> float:
        """max |C^T C - I| over all blocks."""
        worst = 0.0
        for block in self.blocks.values():
            gram = block.coefficients.T @ block.coefficients
            worst = max(worst, float(np.max(np.abs(gram - np.eye(gram.shape[0])))))
        return worst

    def completeness_error(self) -> float:
        """max |C C^T - I| over all blocks."""
        worst = 0.0
        for block in self.blocks.values():
            projector = block.coefficients @ block.coefficients.T
            worst = max(worst, float(np.max(np.abs(projector - np.eye(projector.shape[0])))))
        return worst


@lru_cache(maxsize=32)
def cg_table(n1: int, n2: int) -> CGTable:
    """Cached table for a domain pair."""
    return CGTable(n1, n2)


def cg_coefficient(
    j1: HalfInteger,
    j2: HalfInteger,
    J: HalfInteger,
    M: HalfInteger,
    m1: HalfInteger,
    m2: HalfInteger
) -> float:
    """
    Clebsch-Gordan coefficient <J, M | j1 m1; j2 m2> (Condon-Shortley phase).

    Selection-rule violations (M != m1 + m2, triangle inequality, projections
    out of range) return 0.

    Raises:
        SpinDomainError: If any argument is not a half-integer or j1, j2 < 0
    """
    two_j1, two_j2, two_J, two_M, two_m1, two_m2 = (to_twice(x) for x in (j1, j2, J, M, m1, m2))
    if two_j1 < 0 or two_j2 < 0:
        raise SpinDomainError(f"Spin magnitudes must be non-negative (j1={j1}, j2={j2})")

    if two_M != two_m1 + two_m2:
        return 0.0
    if not abs(two_j1 - two_j2) <= two_J <= two_j1 + two_j2 or (two_j1 + two_j2 - two_J) % 2:
        return 0.0
    if abs(two_M) > two_J or (two_J - two_M) % 2:
        return 0.0
    if abs(two_m1) > two_j1 or (two_j1 - two_m1) % 2 or abs(two_m2) > two_j2 or (two_j2 - two_m2) % 2:
        return 0.0
    return cg_table(two_j1, two_j2).coefficient(two_J, two_M, two_m1, two_m2)


def coupled_state_vector(n1: int, n2: int, two_J: int, two_M: int) -> np.ndarray:
    """
    |J, M> expanded in block M of the product basis (overall sign arbitrary).

    Raises:
        SpinDomainError: If J is not a sector of block M
    """
    if abs(two_M) > n1 + n2 or (n1 + n2 - two_M) % 2:
        raise SpinDomainError(f"M={half(two_M)} is not a magnetization of N=({n1}, {n2})")
    two_Js, vectors = block_eigenbasis(n1, n2, two_M)
    matches = np.nonzero(two_Js == two_J)[0]
    if matches.size == 0:
        raise SpinDomainError(f"J={half(two_J)} is not a total spin at M={half(two_M)} for N=({n1}, {n2})")
    vector = np.array(vectors[:, matches[0]], copy=True)
    return vector if vector[np.argmax(np.abs(vector))] > 0 else -vector
