"""
Scenario model: one reproducible simulation request.

Sections map 1:1 onto the tables of a scenario TOML file. All physical
quantities carry their unit in the key name.
"""

import logging
from typing import List, Optional

from pydantic import Field, model_validator
from typing_extensions import Literal

from domain_relaxation.core.base_models import ScenarioSection
from domain_relaxation.core.registry import register_exception
from domain_relaxation.core.sampling import SamplingGrid, SteadyStateCriterion
from domain_relaxation.physics.initial_config import InitialConfig
from domain_relaxation.physics.reservoir import ReservoirSpec
from domain_relaxation.physics.spin_algebra import DomainPair

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

# Default budget for the exact solver's block storage.
DEFAULT_MEMORY_BUDGET_BYTES = 1 << 30

COMPLEX_BYTES = 16


@register_exception
class ScenarioValidationError(ValueError):
    """Raised when a scenario is rejected; ``key`` names the offending dotted key."""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


class DomainsSection(ScenarioSection):
    n1: int = Field(..., ge=0, description="Spins in the first domain")
    n2: int = Field(..., ge=0, description="Spins in the second domain")

    @model_validator(mode="after")
    def _check_nonempty(self) -> "DomainsSection":
        if self.n1 + self.n2 == 0:
            raise ValueError("at least one domain must contain spins")
        return self


class ReservoirSection(ScenarioSection):
    temperature_mk: float = Field(default=0.0, ge=0.0, description="Reservoir temperature in millikelvin")
    gamma_hz: float = Field(default=0.01, gt=0.0, description="Collective damping rate gamma in s^-1")
    spin_frequency_hz: float = Field(default=1.0e10, gt=0.0, description="omega_s / 2 pi in hertz")

    def to_spec(self) -> ReservoirSpec:
        return ReservoirSpec.from_millikelvin(
            self.temperature_mk,
            spin_frequency_hz=self.spin_frequency_hz,
            damping_rate=self.gamma_hz
        )


class IntegrationSection(ScenarioSection):
    method: Literal["exact", "closure", "both"] = Field(default="exact", description="Solver(s) to run")
    t_max_s: float = Field(..., gt=0.0, description="Integration horizon in seconds")
    sample_count: int = Field(default=401, ge=2, description="Uniform samples including t = 0")
    rtol: Optional[float] = Field(default=None, gt=0.0, description="Relative tolerance override")
    atol: Optional[float] = Field(default=None, gt=0.0, description="Absolute tolerance override")

    @property
    def methods(self) -> List[str]:
        return ["exact", "closure"] if self.method == "both" else [self.method]


class SteadyStateSection(ScenarioSection):
    window: int = Field(default=32, ge=1, description="Window length in samples")
    eps: float = Field(default=1e-6, gt=0.0, description="Relative derivative threshold")
    stop_at_steady: bool = Field(default=True, description="Stop integrating once the criterion holds")

    def criterion(self) -> SteadyStateCriterion:
        return SteadyStateCriterion(window=self.window, eps=self.eps)


class SweepSection(ScenarioSection):
    n_values: List[int] = Field(..., min_length=1, description="Domain sizes to sweep")
    vary: Literal["both", "n1", "n2"] = Field(default="both", description="Which domain sizes follow N")

    @model_validator(mode="after")
    def _check_values(self) -> "SweepSection":
        if any(n < 1 for n in self.n_values):
            raise ValueError("sweep sizes must be positive")
        return self


class Scenario(ScenarioSection):
    """A complete simulation request."""

    schema_version: Literal[1] = Field(default=SCHEMA_VERSION, description="Scenario file schema version")
    name: str = Field(..., min_length=1, description="Scenario name used for output files")
    description: str = Field(default="", description="Free text")
    domains: DomainsSection
    initial: InitialConfig = Field(default_factory=InitialConfig)
    reservoir: ReservoirSection = Field(default_factory=ReservoirSection)
    integration: IntegrationSection
    steady_state: SteadyStateSection = Field(default_factory=SteadyStateSection)
    sweep: Optional[SweepSection] = None

    @model_validator(mode="after")
    def _check_initial(self) -> "Scenario":
        self.initial.validate_for(self.domain_pair())
        return self

    def domain_pair(self) -> DomainPair:
        return DomainPair.of(self.domains.n1, self.domains.n2)

    def reservoir_spec(self) -> ReservoirSpec:
        return self.reservoir.to_spec()

    def grid(self) -> SamplingGrid:
        return SamplingGrid(t_max_s=self.integration.t_max_s, sample_count=self.integration.sample_count)

    def with_domains(self, n1: int, n2: int) -> "Scenario":
        """Copy with other domain sizes (validated)."""
        data = self.model_dump()
        data["domains"] = {"n1": n1, "n2": n2}
        return Scenario.model_validate(data)


def exact_memory_estimate(n1: int, n2: int) -> int:
    """Bytes of complex block storage the exact solver needs for N=(n1, n2)."""
    return (n1 + 1) * (n2 + 1) * min(n1, n2 + 1) * COMPLEX_BYTES


def validate_exact_budget(scenario: Scenario, memory_budget_bytes: int = DEFAULT_MEMORY_BUDGET_BYTES) -> None:
    """
    Reject exact runs whose block storage exceeds the memory budget.

    Raises:
        ScenarioValidationError: With key ``integration.method``
    """
    if "exact" not in scenario.integration.methods:
        return
    n1, n2 = scenario.domains.n1, scenario.domains.n2
    needed = exact_memory_estimate(n1, n2)
    if needed > memory_budget_bytes:
        raise ScenarioValidationError(
            f"exact solver for N=({n1}, {n2}) needs about {needed} bytes, over the budget of "
            f"{memory_budget_bytes} bytes; use method = \"closure\" or raise DOMAIN_RELAX_EXACT_MEMORY_BYTES",
            key="integration.method"
        )
    logger.debug(f"Exact storage estimate for N=({n1}, {n2}): {needed} bytes")
