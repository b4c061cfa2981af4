"""
Blocked density matrices in the coupled |J, M> frame.

Rotating every M-block by its real orthogonal Clebsch-Gordan matrix turns
the collective dissipator into independent tridiagonal chains: the element
rho~_M[J, J'] only couples to rho~_{M+1}[J, J'] (emission) and
rho~_{M-1}[J, J'] (absorption). The frame stores one chain per pair J >= J',
running over M = -J'..J', and the whole generator is a single sparse
tridiagonal matrix in dimensionless time tau = gamma t.

Observables of domain spins connect sectors with |J - J'| <= 2 only, so the
chains with larger offsets may be left out without changing any reported
quantity.
"""

from functools import lru_cache
import logging
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.sparse as sparse

from domain_relaxation.physics.clebsch_gordan import cg_table
from domain_relaxation.physics.reservoir import ReservoirSpec
from domain_relaxation.physics.spin_algebra import DomainPair, flip_flop_block, magnetization_block

logger = logging.getLogger(__name__)

OBSERVABLES = ("jz1", "jz2", "a12", "jz1jz2", "jtot2", "trace")

# Largest sector offset |J - J'| any reported observable reads.
OBSERVABLE_SECTOR_OFFSET = 2


def _lowering_squared(two_J: np.ndarray, two_M: np.ndarray) -> np.ndarray:
    """<J M|J+ J-|J M> = (J + M)(J - M + 1)."""
    return np.maximum((two_J + two_M) * (two_J - two_M + 2) / 4.0, 0.0)


def _raising_squared(two_J: np.ndarray, two_M: np.ndarray) -> np.ndarray:
    """<J M|J- J+|J M> = (J - M)(J + M + 1)."""
    return np.maximum((two_J - two_M) * (two_J + two_M + 2) / 4.0, 0.0)


def chain_element_count(n1: int, n2: int, max_offset: Optional[int] = None) -> int:
    """Number of chain elements for a domain pair and sector-offset cutoff."""
    two_Js = range(abs(n1 - n2), n1 + n2 + 1, 2)
    total = 0
    for two_J in two_Js:
        for two_Jp in two_Js:
            if two_Jp > two_J:
                break
            if max_offset is None or two_J - two_Jp <= 2 * max_offset:
                total += two_Jp + 1
    return total


class SectorFrame:
    """
    Chain layout of blocked density matrices for one domain pair.

    Args:
        domains: The domain pair
        max_offset: Largest |J - J'| carried; None keeps every chain
    """

    def __init__(self, domains: DomainPair, max_offset: Optional[int] = None):
        self.domains = domains
        self.max_offset = max_offset
        n1, n2 = domains.n1, domains.n2
        self.table = cg_table(n1, n2)

        two_Js = list(range(abs(n1 - n2), n1 + n2 + 1, 2))
        parts_J, parts_Jp, parts_M = [], [], []
        self.chains: Dict[Tuple[int, int], slice] = {}
        position = 0
        for two_J in two_Js:
            for two_Jp in two_Js:
                if two_Jp > two_J:
                    break
                if max_offset is not None and two_J - two_Jp > 2 * max_offset:
                    continue
                length = two_Jp + 1
                parts_J.append(np.full(length, two_J))
                parts_Jp.append(np.full(length, two_Jp))
                parts_M.append(np.arange(-two_Jp, two_Jp + 1, 2))
                self.chains[(two_J, two_Jp)] = slice(position, position + length)
                position += length

        self.size = position
        self.two_J = np.concatenate(parts_J)
        self.two_Jp = np.concatenate(parts_Jp)
        self.two_M = np.concatenate(parts_M)

        # position of each element inside its rotated block
        lowest = np.maximum(abs(n1 - n2), np.abs(self.two_M))
        self.row = (self.two_J - lowest) // 2
        self.col = (self.two_Jp - lowest) // 2

        order = np.argsort(self.two_M, kind="stable")
        keys, starts = np.unique(self.two_M[order], return_index=True)
        self.block_positions: Dict[int, np.ndarray] = {
            int(k): group for k, group in zip(keys, np.split(order, starts[1:]))
        }
        self.coherence_mask = self.two_J != self.two_Jp
        logger.debug(
            f"Sector frame for N=({n1}, {n2}): {len(self.chains)} chains, {self.size} elements, "
            f"max offset {max_offset}"
        )

    @property
    def is_complete(self) -> bool:
        """True when every chain is carried and the frame is invertible."""
        n1, n2 = self.domains.n1, self.domains.n2
        return self.max_offset is None or 2 * self.max_offset >= n1 + n2 - abs(n1 - n2)

    @property
    def magnetizations(self) -> Tuple[int, ...]:
        return tuple(sorted(self.block_positions))

    # ========================================
    # Conversions
    # ========================================

    def rotate_block(self, two_M: int, block: np.ndarray) -> np.ndarray:
        """C^T rho_M C for one product-basis block."""
        coefficients = self.table.blocks[two_M].coefficients
        return coefficients.T @ block @ coefficients

    def to_chains(self, blocks: Dict[int, np.ndarray]) -> np.ndarray:
        """Chain vector of product-basis blocks keyed by 2M (real when the blocks are)."""
        dtype = complex if any(np.iscomplexobj(b) and np.any(b.imag) for b in blocks.values()) else float
        y = np.zeros(self.size, dtype=dtype)
        for two_M, positions in self.block_positions.items():
            block = blocks[two_M]
            rotated = self.rotate_block(two_M, block.real if dtype is float else block)
            y[positions] = rotated[self.row[positions], self.col[positions]]
        return y

    def frame_block(self, y: np.ndarray, two_M: int) -> np.ndarray:
        """Hermitian block rho~_M in the coupled basis (carried chains only)."""
        positions = self.block_positions[two_M]
        dimension = self.table.blocks[two_M].two_J.size
        block = np.zeros((dimension, dimension), dtype=y.dtype)
        rows, cols = self.row[positions], self.col[positions]
        block[cols, rows] = np.conj(y[positions])
        block[rows, cols] = y[positions]
        return block

    def to_blocks(self, y: np.ndarray) -> Dict[int, np.ndarray]:
        """
        Product-basis blocks keyed by 2M.

        Raises:
            ValueError: When chains were dropped and the state is incomplete
        """
        if not self.is_complete:
            raise ValueError("A truncated sector frame cannot reconstruct the density matrix")
        blocks = {}
        for two_M in self.domains.two_M_values():
            coefficients = self.table.blocks[two_M].coefficients
            blocks[two_M] = coefficients @ self.frame_block(y, two_M) @ coefficients.T
        return blocks

    # ========================================
    # Generator and observables
    # ========================================

    def generator(self, reservoir: ReservoirSpec) -> sparse.csr_matrix:
        """
        Collective dissipator on the chain vector, per unit of tau = gamma t.

        d rho~/d tau = (n+1)[2 a_J a_J' rho~(M+1) - (K_J + K_J') rho~(M)]
                     + n [2 b_J b_J' rho~(M-1) - (K'_J + K'_J') rho~(M)]
        """
        nbar = reservoir.thermal_occupation
        two_J = self.two_J.astype(float)
        two_Jp = self.two_Jp.astype(float)
        two_M = self.two_M.astype(float)

        diagonal = -(nbar + 1.0) * (_lowering_squared(two_J, two_M) + _lowering_squared(two_Jp, two_M))
        diagonal -= nbar * (_raising_squared(two_J, two_M) + _raising_squared(two_Jp, two_M))
        # element k couples to k+1 (M+1, same chain) and k-1 (M-1); the
        # matrix elements vanish across chain boundaries
        from_above = 2.0 * (nbar + 1.0) * np.sqrt(
            _lowering_squared(two_J, two_M + 2) * _lowering_squared(two_Jp, two_M + 2)
        )
        from_below = 2.0 * nbar * np.sqrt(
            _raising_squared(two_J, two_M - 2) * _raising_squared(two_Jp, two_M - 2)
        )
        return sparse.diags(
            [from_below[1:], diagonal, from_above[:-1]],
            [-1, 0, 1],
            shape=(self.size, self.size),
            format="csr"
        )

    def observable_weights(self) -> Dict[str, np.ndarray]:
        """
        Real weight vectors w with <O> = w . Re(y).

        Off-diagonal chain elements count twice (rho~[J, J'] + rho~[J', J]).
        """
        n1, n2 = self.domains.n1, self.domains.n2
        weights = {name: np.zeros(self.size) for name in OBSERVABLES}
        multiplicity = np.where(self.coherence_mask, 2.0, 1.0)

        for two_M, positions in self.block_positions.items():
            block = magnetization_block(n1, n2, two_M)
            coefficients = self.table.blocks[two_M].coefficients
            rows, cols = self.row[positions], self.col[positions]
            rotated = {
                "jz1": coefficients.T @ (block.m1[:, None] * coefficients),
                "jz2": coefficients.T @ (block.m2[:, None] * coefficients),
                "jz1jz2": coefficients.T @ ((block.m1 * block.m2)[:, None] * coefficients),
                "a12": coefficients.T @ (flip_flop_block(n1, n2, two_M) @ coefficients),
            }
            for name, matrix in rotated.items():
                weights[name][positions] = matrix[rows, cols]
            diagonal = rows == cols
            two_J = self.two_J[positions]
            weights["jtot2"][positions] = np.where(diagonal, two_J * (two_J + 2) / 4.0, 0.0)
            weights["trace"][positions] = np.where(diagonal, 1.0, 0.0)

        return {name: w * multiplicity for name, w in weights.items()}

    def max_coherence(self, y: np.ndarray) -> float:
        """Largest |rho~[J, J']| over carried cross-sector elements."""
        if not np.any(self.coherence_mask):
            return 0.0
        return float(np.max(np.abs(y[self.coherence_mask])))


@lru_cache(maxsize=16)
def sector_frame(n1: int, n2: int, max_offset: Optional[int] = None) -> SectorFrame:
    """Cached frame for a domain pair."""
    return SectorFrame(DomainPair.of(n1, n2), max_offset)
