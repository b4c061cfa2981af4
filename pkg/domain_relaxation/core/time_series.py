"""
Sampled observable trajectories produced by the solvers.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional

import numpy as np

# Column order of the CSV export; absent observables serialize as empty cells.
SERIES_COLUMNS = ("t_s", "jz1", "jz2", "jz_sum", "a12", "jz1jz2", "trace", "jtot2", "method")

UNITS = {
    "t_s": "s",
    "jz1": "hbar",
    "jz2": "hbar",
    "jz_sum": "hbar",
    "a12": "hbar^2",
    "jz1jz2": "hbar^2",
    "trace": "1",
    "jtot2": "hbar^2",
}


def _frozen(values: Optional[np.ndarray]) -> Optional[np.ndarray]:
    if values is None:
        return None
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """
    Observable samples with their method tag and scenario snapshot.

    ``trace`` and ``jtot2`` are None for the moment closure, which does not
    model them. ``djz1_dt``/``djz2_dt`` hold generator-exact derivatives in
    spin units per second.
    """

    times_s: np.ndarray
    jz1: np.ndarray
    jz2: np.ndarray
    a12: np.ndarray
    jz1jz2: np.ndarray
    method: str
    converged: bool = False
    trace: Optional[np.ndarray] = None
    jtot2: Optional[np.ndarray] = None
    djz1_dt: Optional[np.ndarray] = None
    djz2_dt: Optional[np.ndarray] = None
    min_eigenvalue: Optional[np.ndarray] = None
    scenario: Dict[str, Any] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("times_s", "jz1", "jz2", "a12", "jz1jz2", "trace", "jtot2",
                     "djz1_dt", "djz2_dt", "min_eigenvalue"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

        n = self.times_s.size
        if n == 0:
            raise ValueError("TimeSeries needs at least one sample")
        if np.any(np.diff(self.times_s) <= 0):
            raise ValueError("TimeSeries times must be strictly increasing")
        for name, values in self.arrays().items():
            if values.size != n:
                raise ValueError(f"Array '{name}' has {values.size} samples, expected {n}")

    @property
    def jz_sum(self) -> np.ndarray:
        return self.jz1 + self.jz2

    def __len__(self) -> int:
        return int(self.times_s.size)

    def arrays(self) -> Dict[str, np.ndarray]:
        """All present per-sample arrays keyed by field name."""
        names = ("times_s", "jz1", "jz2", "a12", "jz1jz2", "trace", "jtot2",
                 "djz1_dt", "djz2_dt", "min_eigenvalue")
        return {name: getattr(self, name) for name in names if getattr(self, name) is not None}

    def columns(self) -> Dict[str, Any]:
        """Export columns in ``SERIES_COLUMNS`` order."""
        n = len(self)
        missing = np.full(n, np.nan)
        return {
            "t_s": self.times_s,
            "jz1": self.jz1,
            "jz2": self.jz2,
            "jz_sum": self.jz_sum,
            "a12": self.a12,
            "jz1jz2": self.jz1jz2,
            "trace": self.trace if self.trace is not None else missing,
            "jtot2": self.jtot2 if self.jtot2 is not None else missing,
            "method": [self.method] * n,
        }

    def final(self) -> Dict[str, float]:
        """Last sample of each observable."""
        values = {
            "t_s": float(self.times_s[-1]),
            "jz1": float(self.jz1[-1]),
            "jz2": float(self.jz2[-1]),
            "a12": float(self.a12[-1]),
            "jz1jz2": float(self.jz1jz2[-1]),
        }
        if self.trace is not None:
            values["trace"] = float(self.trace[-1])
        if self.jtot2 is not None:
            values["jtot2"] = float(self.jtot2[-1])
        return values

    def with_scenario(self, scenario: Dict[str, Any], **metadata: Any) -> "TimeSeries":
        """Copy carrying a scenario snapshot and extra metadata."""
        return replace(self, scenario=dict(scenario), metadata={**self.metadata, **metadata})
