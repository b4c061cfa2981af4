"""
Dense Lindblad reference for small domain pairs.

Builds the full Liouvillian on vec(rho) (column stacking) without using the
magnetization-block structure. Used as ground truth for the blocked solver.
"""

import logging
from typing import Dict, List, Sequence

import numpy as np
import scipy.linalg as linalg

from domain_relaxation.physics.reservoir import ReservoirSpec
from domain_relaxation.physics.spin_algebra import DomainPair, collective_operators

logger = logging.getLogger(__name__)

# Largest N1 + N2 the dense superoperator is built for.
MAX_DENSE_SPINS = 8


def _dissipator(operator: np.ndarray) -> np.ndarray:
    """Superoperator of L(A) rho = 2 A rho A^+ - A^+ A rho - rho A^+ A."""
    size = operator.shape[0]
    identity = np.eye(size)
    number = operator.conj().T @ operator
    return (
        2.0 * np.kron(operator.conj(), operator)
        - np.kron(identity, number)
        - np.kron(number.T, identity)
    )


class DenseLindbladReference:
    """
    Unblocked master equation for one domain pair and reservoir.

    Args:
        domains: Domain pair with N1 + N2 <= 8
        reservoir: The shared reservoir

    Raises:
        ValueError: For domain pairs too large for a dense superoperator
    """

    def __init__(self, domains: DomainPair, reservoir: ReservoirSpec):
        if domains.n_total > MAX_DENSE_SPINS:
            raise ValueError(f"Dense reference supports N1 + N2 <= {MAX_DENSE_SPINS}, got {domains.n_total}")
        self.domains = domains
        self.reservoir = reservoir
        self.operators = collective_operators(domains)
        self.size = domains.product_dimension

        lower = self.operators.lower.toarray()
        self.liouvillian = (
            reservoir.emission_rate * _dissipator(lower)
            + reservoir.absorption_rate * _dissipator(lower.conj().T)
        )
        logger.debug(f"Dense Liouvillian for N=({domains.n1}, {domains.n2}): {self.liouvillian.shape}")

    def _vec(self, rho: np.ndarray) -> np.ndarray:
        return np.asarray(rho, dtype=complex).reshape(-1, order="F")

    def _unvec(self, vector: np.ndarray) -> np.ndarray:
        return vector.reshape(self.size, self.size, order="F")

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        """d rho / dt in s^-1."""
        return self._unvec(self.liouvillian @ self._vec(rho))

    def propagate(self, rho: np.ndarray, times_s: Sequence[float]) -> List[np.ndarray]:
        """rho(t) = exp(L t) rho at each requested time."""
        vector = self._vec(rho)
        return [self._unvec(linalg.expm(self.liouvillian * t) @ vector) for t in times_s]

    def steady_states(self) -> List[np.ndarray]:
        """
        Unit-trace Hermitian basis of the Liouvillian null space.

        Basis elements with zero trace (stationary coherences) are returned
        normalized to unit Frobenius norm instead.
        """
        kernel = linalg.null_space(self.liouvillian, rcond=1e-10)
        states = []
        for column in kernel.T:
            rho = self._unvec(column)
            rho = (rho + rho.conj().T) / 2.0
            trace = np.trace(rho)
            if abs(trace) > 1e-8:
                rho = rho / trace
            else:
                rho = rho / np.linalg.norm(rho)
            states.append(rho)
        return states

    def observables(self, rho: np.ndarray) -> Dict[str, float]:
        ops = self.operators
        dense = {
            "jz1": ops.j1z,
            "jz2": ops.j2z,
            "a12": ops.flip_flop(),
            "jz1jz2": ops.j1z @ ops.j2z,
            "jtot2": ops.total_spin_squared(),
        }
        values = {name: float(np.real(np.trace(op.toarray() @ rho))) for name, op in dense.items()}
        values["trace"] = float(np.real(np.trace(rho)))
        return values
