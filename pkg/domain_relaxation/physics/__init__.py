"""
Physics module for the relaxation simulator.

This module contains the spin algebra, Clebsch-Gordan tables, the reservoir,
initial configurations and the analytic sector oracle.
"""

from domain_relaxation.physics.spin_algebra import (
    SpinDomainError,
    SpinDomain,
    DomainPair,
    ProductBasisIndex,
    MagnetizationBlock,
    Direction,
    ladder_element,
    magnetization_block,
    apply_collective_lower,
    collective_operators
)
from domain_relaxation.physics.clebsch_gordan import (
    CGTable,
    cg_table,
    cg_coefficient,
    coupled_state_vector
)
from domain_relaxation.physics.reservoir import ReservoirSpec
from domain_relaxation.physics.initial_config import (
    ConfigKind,
    InitialConfig,
    UnsupportedInputError
)

# Sector oracle
from domain_relaxation.physics.sector_oracle import (
    Domain,
    SectorDecomposition,
    SteadyStatePrediction,
    decompose,
    sector_jz,
    steady_state,
    effective_temperature_k
)

__all__ = [
    # Spin algebra
    "SpinDomainError",
    "SpinDomain",
    "DomainPair",
    "ProductBasisIndex",
    "MagnetizationBlock",
    "Direction",
    "ladder_element",
    "magnetization_block",
    "apply_collective_lower",
    "collective_operators",
    # Clebsch-Gordan
    "CGTable",
    "cg_table",
    "cg_coefficient",
    "coupled_state_vector",
    # Reservoir and initial states
    "ReservoirSpec",
    "ConfigKind",
    "InitialConfig",
    "UnsupportedInputError",
    # Sector oracle
    "Domain",
    "SectorDecomposition",
    "SteadyStatePrediction",
    "decompose",
    "sector_jz",
    "steady_state",
    "effective_temperature_k"
]
