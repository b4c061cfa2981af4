"""
Solvers module for the relaxation simulator.

Importing this module registers the ``exact`` and ``closure`` solvers with
the component registry.
"""

from domain_relaxation.solvers.lindblad_solver import (
    LindbladSolver,
    ExactSolverConfig,
    BlockedDensityMatrix,
    ContractViolationError,
    NumericalCorruptionError,
    build_initial,
    rhs,
    observables,
    evolve
)
from domain_relaxation.solvers.closure_solver import (
    ClosureSolver,
    ClosureSolverConfig,
    MomentState,
    closure_rhs,
    closure_jacobian,
    initial_moments,
    evolve_closure
)
from domain_relaxation.solvers.dense_reference import DenseLindbladReference

__all__ = [
    # Exact solver
    "LindbladSolver",
    "ExactSolverConfig",
    "BlockedDensityMatrix",
    "ContractViolationError",
    "NumericalCorruptionError",
    "build_initial",
    "rhs",
    "observables",
    "evolve",
    # Moment closure
    "ClosureSolver",
    "ClosureSolverConfig",
    "MomentState",
    "closure_rhs",
    "closure_jacobian",
    "initial_moments",
    "evolve_closure",
    # Reference
    "DenseLindbladReference"
]
