"""
Relaxation times and the superradiant a/N + b fit.
"""

from dataclasses import dataclass
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from domain_relaxation.core.registry import register_exception
from domain_relaxation.core.time_series import TimeSeries
from domain_relaxation.physics.initial_config import InitialConfig
from domain_relaxation.physics.reservoir import ReservoirSpec
from domain_relaxation.physics.sector_oracle import steady_state
from domain_relaxation.physics.spin_algebra import DomainPair

logger = logging.getLogger(__name__)

TAU_DEFINITION = (
    "tau = first time |<J1z>(t) - <J1z>_ss| <= exp(-1) |<J1z>(0) - <J1z>_ss|, "
    "linearly interpolated between samples; <J1z>_ss from the sector oracle for exact "
    "zero-temperature product-state runs, otherwise the converged final value"
)


@register_exception
class UnconvergedSeriesError(ValueError):
    """Raised when a relaxation time is requested from an unconverged series."""
    pass


@register_exception
class FitError(ValueError):
    """Raised when the a/N + b fit is underdetermined."""
    pass


def reference_steady_value(
    series: TimeSeries,
    domains: DomainPair,
    config: InitialConfig,
    reservoir: ReservoirSpec
) -> float:
    """Steady <J1z> a relaxation time is measured against."""
    if series.method == "exact" and config.is_product and reservoir.temperature_k == 0.0:
        return steady_state(domains, config, reservoir).jz1
    return float(series.jz1[-1])


def relaxation_time(series: TimeSeries, steady_value: Optional[float] = None) -> float:
    """
    e-folding time of the gap between <J1z>(t) and its steady value, in seconds.

    Args:
        series: A converged series
        steady_value: Steady <J1z>; the final sample is used when omitted

    Raises:
        UnconvergedSeriesError: If the series did not reach a steady state
    """
    if not series.converged:
        raise UnconvergedSeriesError(
            f"Series ended at t={series.times_s[-1]:g} s without a steady state; increase t_max_s"
        )
    target_value = float(series.jz1[-1]) if steady_value is None else float(steady_value)
    gaps = np.abs(series.jz1 - target_value)
    if gaps[0] == 0.0:
        return 0.0
    threshold = gaps[0] / math.e
    below = np.nonzero(gaps <= threshold)[0]
    if below.size == 0:
        raise UnconvergedSeriesError(
            f"<J1z> never came within 1/e of its steady value {target_value:.6g}; increase t_max_s"
        )
    i = int(below[0])
    t0, t1 = series.times_s[i - 1], series.times_s[i]
    g0, g1 = gaps[i - 1], gaps[i]
    return float(t0 + (g0 - threshold) / (g0 - g1) * (t1 - t0))


@dataclass(frozen=True)
class RelaxationFit:
    """Least-squares fit tau_N = a / N + b."""
    n_values: Tuple[int, ...]
    taus_s: Tuple[float, ...]
    a: float
    b: float
    residual_norm: float
    r_squared: float
    tau_definition: str = TAU_DEFINITION

    @property
    def n_range(self) -> Tuple[int, int]:
        return min(self.n_values), max(self.n_values)

    def predict(self, n: float) -> float:
        return self.a / n + self.b


def fit_inverse_n(taus: Sequence[Tuple[int, float]]) -> RelaxationFit:
    """
    Fit relaxation times against a / N + b.

    Raises:
        FitError: With fewer than three distinct N or non-finite times
    """
    pairs = sorted((int(n), float(t)) for n, t in taus)
    if len({n for n, _ in pairs}) < 3:
        raise FitError(f"Need at least 3 distinct N values for the a/N + b fit, got {len(set(n for n, _ in pairs))}")
    if any(n <= 0 for n, _ in pairs):
        raise FitError("Domain sizes must be positive")
    n = np.array([p[0] for p in pairs], dtype=float)
    tau = np.array([p[1] for p in pairs])
    if not np.all(np.isfinite(tau)):
        raise FitError("Relaxation times must be finite")

    design = np.column_stack([1.0 / n, np.ones_like(n)])
    coefficients, _, rank, _ = np.linalg.lstsq(design, tau, rcond=None)
    if rank < 2:
        raise FitError("Degenerate design matrix")
    a, b = (float(c) for c in coefficients)

    residual = tau - design @ coefficients
    residual_norm = float(np.linalg.norm(residual))
    total = float(np.sum((tau - tau.mean()) ** 2))
    ss_res = float(np.sum(residual ** 2))
    r_squared = 1.0 - ss_res / total if total > 0.0 else 1.0
    logger.info(f"Fit over N={int(n[0])}..{int(n[-1])}: a={a:.6g} s, b={b:.6g} s, R^2={r_squared:.6f}")
    return RelaxationFit(
        n_values=tuple(int(v) for v in n),
        taus_s=tuple(float(v) for v in tau),
        a=a,
        b=b,
        residual_norm=residual_norm,
        r_squared=r_squared,
    )
