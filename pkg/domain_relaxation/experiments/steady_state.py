"""
Steady-state detection on sampled series.
"""

from dataclasses import dataclass, field
import logging
from typing import Dict, Optional

import numpy as np

from domain_relaxation.core.sampling import SteadyStateCriterion
from domain_relaxation.core.time_series import TimeSeries

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SteadyStateResult:
    converged: bool
    t_star_s: Optional[float] = None
    index: Optional[int] = None
    values: Dict[str, float] = field(default_factory=dict)


def _derivatives(series: TimeSeries):
    if series.djz1_dt is not None and series.djz2_dt is not None:
        return series.djz1_dt, series.djz2_dt
    if len(series) < 2:
        return np.zeros(1), np.zeros(1)
    return np.gradient(series.jz1, series.times_s), np.gradient(series.jz2, series.times_s)


def detect_steady(series: TimeSeries, window: int = 32, eps: float = 1e-6) -> SteadyStateResult:
    """
    First time both domain polarizations are stationary over a full window.

    Uses the generator derivatives recorded by the solver and finite
    differences otherwise. ``gamma_per_s``, ``n1`` and ``n2`` come from the
    series metadata. A series shorter than the window is unconverged.
    """
    criterion = SteadyStateCriterion(window=window, eps=eps)
    meta = series.metadata
    djz1, djz2 = _derivatives(series)
    index = criterion.first_index(djz1, djz2, meta["gamma_per_s"], meta["n1"], meta["n2"])
    if index is None:
        logger.debug(f"No steady window of {window} samples in {len(series)} samples")
        return SteadyStateResult(converged=False)
    return SteadyStateResult(
        converged=True,
        t_star_s=float(series.times_s[index]),
        index=index,
        values={"jz1": float(series.jz1[index]), "jz2": float(series.jz2[index])},
    )
