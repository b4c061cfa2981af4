"""
Test configuration and fixtures for the command-line application tests.
"""

import numpy as np
import pytest

from domain_relaxation.core.time_series import TimeSeries
from domain_relaxation.experiments import RelaxationFit, SweepResult, SweepRow
from domain_relaxation.experiments.sweep import SweepFailure

SCENARIO_TEXT = """
name = "small"

[domains]
n1 = 2
n2 = 1

[initial]
config = "antiparallel"

[integration]
method = "exact"
t_max_s = 2000.0
sample_count = 801
"""


@pytest.fixture
def scenario_text():
    """Minimal valid scenario document."""
    return SCENARIO_TEXT


@pytest.fixture
def scenario_file(tmp_path):
    """Minimal scenario written to a temporary file."""
    path = tmp_path / "small.toml"
    path.write_text(SCENARIO_TEXT, encoding="utf-8")
    return path


@pytest.fixture
def sample_series():
    """Short closure-style series without trace or J^2."""
    times = np.array([0.0, 1.0, 2.0])
    return TimeSeries(
        times_s=times,
        jz1=np.array([1.0, 0.25, 0.125]),
        jz2=np.array([-1.0, -0.5, -0.25]),
        a12=np.array([0.0, 0.5, 0.75]),
        jz1jz2=np.array([-1.0, -0.125, -0.03125]),
        method="closure",
        converged=True,
        metadata={"scenario_name": "sample", "n1": 2, "n2": 2, "gamma_per_s": 0.01, "nbar": 0.0, "t_star_s": 2.0},
    )


@pytest.fixture
def sample_sweep_result():
    """Three completed sweep points, one failure and an exact fit."""
    rows = [SweepRow(n, 100.0 / n + 2.0, -0.5, "closure") for n in (10, 20, 40)]
    fit = RelaxationFit(
        n_values=(10, 20, 40),
        taus_s=tuple(row.tau_s for row in rows),
        a=100.0,
        b=2.0,
        residual_norm=0.0,
        r_squared=1.0,
    )
    return SweepResult(rows=rows, failures=[SweepFailure(80, "IntegrationError", "step size underflow")], fit=fit)
