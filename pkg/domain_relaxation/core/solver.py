"""
Base Solver class for the relaxation simulator.
"""

from abc import ABC, abstractmethod
import logging
from typing import TYPE_CHECKING, Any, Dict, Generic, Optional, Type, TypeVar

import numpy as np

from domain_relaxation.core.base_models import SolverConfig
from domain_relaxation.core.registry import register_exception
from domain_relaxation.core.sampling import SamplingGrid, SteadyStateCriterion
from domain_relaxation.core.time_series import TimeSeries

if TYPE_CHECKING:
    from domain_relaxation.physics.initial_config import InitialConfig
    from domain_relaxation.physics.reservoir import ReservoirSpec
    from domain_relaxation.physics.spin_algebra import DomainPair

logger = logging.getLogger(__name__)

# Type variables for generic solver typing
TConfig = TypeVar('TConfig', bound=SolverConfig)
TState = TypeVar('TState')


@register_exception
class IntegrationError(RuntimeError):
    """Raised when time integration fails; carries the last good time."""

    def __init__(self, message: str, last_good_time_s: Optional[float] = None):
        super().__init__(message)
        self.last_good_time_s = last_good_time_s


class Solver(ABC, Generic[TConfig, TState]):
    """
    Base class for the time integrators.

    A solver prepares its own state representation from an initial
    configuration and evolves it on a sampling grid, returning a TimeSeries.

    Type Parameters:
        TConfig: The configuration model type (must inherit from SolverConfig)
        TState: The state representation the solver integrates
    """

    method: str = ""

    def __init__(
        self,
        name: str,
        description: str,
        config: Optional[TConfig] = None
    ):
        """
        Initialize a solver.

        Args:
            name: Human-readable solver name
            description: What the solver integrates
            config: Optional configuration object (must be a Pydantic model)
        """
        self.name = name
        self.description = description
        self.config = config or self._get_default_config()

        if not isinstance(self.config, self._get_config_class()):
            raise TypeError(
                f"Config must be an instance of {self._get_config_class().__name__}, "
                f"got {type(self.config).__name__}"
            )

    @classmethod
    @abstractmethod
    def _get_config_class(cls) -> Type[TConfig]:
        """Return the configuration class for this solver."""
        pass

    def _get_default_config(self) -> TConfig:
        return self._get_config_class()()

    @abstractmethod
    def initial_state(self, domains: "DomainPair", config: "InitialConfig") -> TState:
        """Build the solver's state for an initial configuration."""
        pass

    @abstractmethod
    def _evolve(
        self,
        state: TState,
        domains: "DomainPair",
        reservoir: "ReservoirSpec",
        grid: SamplingGrid,
        criterion: Optional[SteadyStateCriterion]
    ) -> TimeSeries:
        """
        Integrate ``state`` over ``grid``.

        Implementations stop at the first sample where ``criterion`` fires,
        when one is given, and flag the series as converged.

        Raises:
            IntegrationError: If integration fails
        """
        pass

    def evolve(
        self,
        state: TState,
        domains: "DomainPair",
        reservoir: "ReservoirSpec",
        grid: SamplingGrid,
        criterion: Optional[SteadyStateCriterion] = None
    ) -> TimeSeries:
        """
        Evolve a state and return the sampled observables.

        Domain and contract errors propagate unchanged; numerical failures
        surface as IntegrationError.
        """
        logger.info(
            f"Solver '{self.name}' evolving N=({domains.n1}, {domains.n2}) "
            f"to t={grid.t_max_s:g} s over {grid.sample_count} samples"
        )
        try:
            series = self._evolve(state, domains, reservoir, grid, criterion)
        except IntegrationError as e:
            logger.error(f"Solver '{self.name}' failed at t={e.last_good_time_s}: {e}")
            raise
        except (FloatingPointError, ArithmeticError, np.linalg.LinAlgError) as e:
            logger.error(f"Solver '{self.name}' hit a numerical failure: {e}")
            raise IntegrationError(f"Integration failed: {e}") from e

        if not series.converged and criterion is not None:
            logger.warning(
                f"Solver '{self.name}' reached t_max={grid.t_max_s:g} s without a steady state"
            )
        return series

    def describe(self) -> Dict[str, Any]:
        """Method, name and configuration of this solver."""
        return {
            "method": self.method,
            "name": self.name,
            "description": self.description,
            "config": self.config.model_dump(),
        }
