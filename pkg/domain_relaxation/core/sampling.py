"""
Sampling grids and the steady-state criterion shared by both solvers.
"""

from typing import Optional, Sequence

import numpy as np
from pydantic import Field

from domain_relaxation.core.base_models import ValueModel


class SamplingGrid(ValueModel):
    """Uniform sample times on [0, t_max_s]."""

    t_max_s: float = Field(..., gt=0.0, description="Integration horizon in seconds")
    sample_count: int = Field(default=401, ge=2, description="Number of samples including t=0")

    def times_s(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max_s, self.sample_count)

    @property
    def spacing_s(self) -> float:
        return self.t_max_s / (self.sample_count - 1)


class SteadyStateCriterion(ValueModel):
    """
    Derivative-based convergence test.

    A sample k satisfies the criterion when every sample in the window ending
    at k has |d<Jz_a>/dt| below eps * gamma * max(N1, N2) / 2 for both domains.
    """

    window: int = Field(default=32, ge=1, description="Window length in samples")
    eps: float = Field(default=1e-6, gt=0.0, description="Relative derivative threshold")

    def threshold(self, gamma_per_s: float, n1: int, n2: int) -> float:
        """Derivative threshold in spin units per second."""
        return self.eps * gamma_per_s * max(n1, n2) / 2.0

    def first_index(
        self,
        djz1_dt: Sequence[float],
        djz2_dt: Sequence[float],
        gamma_per_s: float,
        n1: int,
        n2: int
    ) -> Optional[int]:
        """
        Index of the first sample closing a window that satisfies the criterion.

        Returns None when no window qualifies.
        """
        limit = self.threshold(gamma_per_s, n1, n2)
        below = (np.abs(np.asarray(djz1_dt)) < limit) & (np.abs(np.asarray(djz2_dt)) < limit)
        if below.size < self.window:
            return None
        # run length of consecutive qualifying samples ending at each index
        runs = np.zeros(below.size, dtype=int)
        count = 0
        for k, ok in enumerate(below):
            count = count + 1 if ok else 0
            runs[k] = count
        hits = np.nonzero(runs >= self.window)[0]
        return int(hits[0]) if hits.size else None
