"""
Shared test fixtures and configuration for the relaxation simulator tests.
"""

from pathlib import Path

import numpy as np
import pytest
import toml

from domain_relaxation.experiments.scenario import Scenario
from domain_relaxation.physics import DomainPair, InitialConfig, ReservoirSpec
from domain_relaxation.solvers import BlockedDensityMatrix
from domain_relaxation.physics.spin_algebra import magnetization_block

REPO_ROOT = Path(__file__).resolve().parent.parent
SCENARIO_DIR = REPO_ROOT / "scenarios"
BASELINE_PATH = Path(__file__).resolve().parent / "baselines" / "regression.toml"


@pytest.fixture
def zero_temperature():
    """Reservoir at T = 0 with the default 10 GHz spins and gamma = 0.01 s^-1."""
    return ReservoirSpec()


@pytest.fixture
def warm_reservoir():
    """Reservoir at 400 mK."""
    return ReservoirSpec.from_millikelvin(400.0)


@pytest.fixture
def antiparallel():
    return InitialConfig.antiparallel()


@pytest.fixture
def parallel():
    return InitialConfig.parallel()


@pytest.fixture
def scenario_dir():
    """Directory of the shipped scenario files."""
    return SCENARIO_DIR


@pytest.fixture
def load_scenario():
    """Factory validating a shipped scenario by name."""
    def load(name: str) -> Scenario:
        return Scenario.model_validate(toml.load(SCENARIO_DIR / f"{name}.toml"))
    return load


def random_state(domains: DomainPair, seed: int = 7, complex_entries: bool = False) -> BlockedDensityMatrix:
    """Random block-diagonal density matrix with unit trace."""
    rng = np.random.default_rng(seed)
    blocks = {}
    for two_M in domains.two_M_values():
        d = magnetization_block(domains.n1, domains.n2, two_M).dimension
        x = rng.normal(size=(d, d))
        if complex_entries:
            x = x + 1j * rng.normal(size=(d, d))
        blocks[two_M] = x @ x.conj().T
    total = sum(np.trace(b).real for b in blocks.values())
    return BlockedDensityMatrix(domains, {k: b / total for k, b in blocks.items()})


@pytest.fixture
def random_blocked_state():
    """Factory for random blocked density matrices."""
    return random_state


class RegressionBaseline:
    """Committed values from ``tests/baselines/regression.toml``."""

    def __init__(self, path: Path):
        self.path = path
        self.values = toml.load(path) if path.exists() else {}

    def check(self, key: str, value: float, rel: float = 1e-6) -> None:
        if key not in self.values:
            pytest.fail(
                f"No baseline for '{key}' (measured {float(value)!r}); "
                f"add '\"{key}\" = {float(value)!r}' to {self.path.name}"
            )
        assert value == pytest.approx(self.values[key], rel=rel)


@pytest.fixture
def regression_baseline():
    return RegressionBaseline(BASELINE_PATH)


# Test configuration
def pytest_configure(config):
    """Configure pytest settings."""
    # Add custom markers
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line(
        "markers", "integration: marks tests as integration tests"
    )
    config.addinivalue_line(
        "markers", "unit: marks tests as unit tests"
    )


# Test collection customization
def pytest_collection_modifyitems(config, items):
    """Modify test collection to add markers automatically."""
    for item in items:
        # Tests under an integration directory are integration tests
        if "integration" in Path(str(item.fspath)).parts:
            item.add_marker(pytest.mark.integration)
        # Add 'unit' marker to all remaining tests by default
        if not any(marker.name in ['integration', 'slow'] for marker in item.iter_markers()):
            item.add_marker(pytest.mark.unit)
