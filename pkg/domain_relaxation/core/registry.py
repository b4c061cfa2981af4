"""
Component registry for the relaxation simulator.

This module provides a centralized registry for the solvers (keyed by the
scenario ``method`` name), their configuration models, and the exceptions
raised across the package.
"""

from dataclasses import dataclass
import logging
from typing import Any, Dict, List, Optional, Set, Type

from domain_relaxation.core.base_models import SolverConfig

logger = logging.getLogger(__name__)


@dataclass
class ComponentInfo:
    """Information about a registered component."""
    name: str
    component_type: str  # 'solver' or 'exception'
    class_type: Type
    module_path: str
    method: Optional[str] = None
    description: Optional[str] = None
    associated_classes: Dict[str, Type] = None

    def __post_init__(self):
        if self.associated_classes is None:
            self.associated_classes = {}


class ComponentRegistry:
    """
    Central registry for solver components.

    Tracks solvers by method name together with their configuration classes,
    and every exception type raised by the package.
    """

    def __init__(self):
        self._solvers: Dict[str, ComponentInfo] = {}
        self._solver_configs: Dict[str, Type[SolverConfig]] = {}
        self._exceptions: Dict[str, Type[Exception]] = {}

        # Track all registered class names for validation
        self._all_classes: Set[str] = set()

    # ========================================
    # Solver Registration
    # ========================================

    def register_solver(
        self,
        solver_class: Type,
        method: str,
        config_class: Optional[Type[SolverConfig]] = None,
        description: Optional[str] = None
    ) -> None:
        """
        Register a solver under its scenario method name.

        Args:
            solver_class: The solver class to register
            method: Scenario ``integration.method`` value selecting this solver
            config_class: The solver's configuration class
            description: Optional description of the solver
        """
        name = solver_class.__name__

        if name in self._all_classes:
            raise ValueError(f"Class '{name}' is already registered")
        if method in self._solvers:
            raise ValueError(f"Method '{method}' is already served by {self._solvers[method].name}")

        info = ComponentInfo(
            name=name,
            component_type="solver",
            class_type=solver_class,
            module_path=f"{solver_class.__module__}.{name}",
            method=method,
            description=description or solver_class.__doc__
        )

        if config_class:
            info.associated_classes['config'] = config_class
            self._solver_configs[config_class.__name__] = config_class
            self._all_classes.add(config_class.__name__)

        self._solvers[method] = info
        self._all_classes.add(name)
        logger.info(f"Registered solver: {name} (method={method})")

    # ========================================
    # Exception Registration
    # ========================================

    def register_exception(self, exception_class: Type[Exception]) -> None:
        """Register an exception class."""
        name = exception_class.__name__

        if name in self._exceptions:
            logger.warning(f"Exception '{name}' is already registered, overwriting")

        self._exceptions[name] = exception_class
        self._all_classes.add(name)
        logger.debug(f"Registered exception: {name}")

    # ========================================
    # Retrieval Methods
    # ========================================

    def get_solver(self, method: str) -> Optional[ComponentInfo]:
        """Get solver information by method name."""
        return self._solvers.get(method)

    def available_methods(self) -> List[str]:
        return sorted(self._solvers)

    def get_exception(self, name: str) -> Optional[Type[Exception]]:
        return self._exceptions.get(name)

    def is_registered(self, class_name: str) -> bool:
        """Check if a class name is registered."""
        return class_name in self._all_classes

    def create_solver(self, method: str, config: Optional[SolverConfig] = None):
        """
        Instantiate the solver registered for ``method``.

        Args:
            method: Scenario method name ('exact' or 'closure')
            config: Optional configuration; the solver default is used otherwise

        Raises:
            KeyError: If no solver serves the method
        """
        info = self._solvers.get(method)
        if info is None:
            raise KeyError(
                f"No solver registered for method '{method}'. "
                f"Available: {', '.join(self.available_methods())}"
            )
        return info.class_type(config=config)

    # ========================================
    # Validation Methods
    # ========================================

    def validate_naming_conventions(self) -> List[str]:
        """
        Validate that all components follow naming conventions.

        Returns:
            List of validation errors
        """
        errors = []

        for method, info in self._solvers.items():
            if not info.name.endswith('Solver'):
                errors.append(f"Solver class '{info.name}' should end with 'Solver'")
            config = info.associated_classes.get('config')
            if config is not None and not config.__name__.endswith('Config'):
                errors.append(f"Solver config '{config.__name__}' should end with 'Config'")

        for name in self._exceptions:
            if not name.endswith('Error'):
                errors.append(f"Exception class '{name}' should end with 'Error'")

        return errors

    def generate_report(self) -> Dict[str, Any]:
        """Generate a report of all registered components."""
        return {
            "solvers": {
                method: {
                    "class": info.name,
                    "module": info.module_path,
                    "description": info.description,
                    "config": info.associated_classes['config'].__name__ if 'config' in info.associated_classes else None
                }
                for method, info in sorted(self._solvers.items())
            },
            "exceptions": sorted(self._exceptions.keys()),
            "total_components": len(self._all_classes)
        }


# Global registry instance
_registry = ComponentRegistry()


# ========================================
# Decorator Functions
# ========================================

def register_solver(
    method: str,
    config_class: Optional[Type[SolverConfig]] = None,
    description: Optional[str] = None
):
    """
    Decorator to register a solver class under a method name.

    Usage:
        @register_solver(method="exact", config_class=ExactSolverConfig)
        class LindbladSolver(Solver):
            ...
    """
    def decorator(cls):
        _registry.register_solver(
            cls,
            method=method,
            config_class=config_class,
            description=description
        )
        return cls
    return decorator


def register_exception(cls):
    """
    Decorator to register an exception class.

    Usage:
        @register_exception
        class MyError(Exception):
            ...
    """
    _registry.register_exception(cls)
    return cls


# ========================================
# Public API
# ========================================

def get_registry() -> ComponentRegistry:
    """Get the global component registry."""
    return _registry
