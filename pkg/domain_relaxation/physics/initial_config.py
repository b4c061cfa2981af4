"""
Initial configurations of the two domains.
"""

from enum import Enum
from typing import Optional, Tuple

from pydantic import Field, model_validator

from domain_relaxation.core.base_models import ValueModel
from domain_relaxation.core.registry import register_exception
from domain_relaxation.physics.spin_algebra import (
    DomainPair,
    ProductBasisIndex,
    SpinDomainError,
    check_projection,
    half,
    to_twice
)


@register_exception
class UnsupportedInputError(ValueError):
    """Raised when an operation needs a product initial state and gets another."""
    pass


class ConfigKind(str, Enum):
    PARALLEL = "parallel"
    ANTIPARALLEL = "antiparallel"
    CUSTOM = "custom"
    COUPLED = "coupled"


class InitialConfig(ValueModel):
    """
    How the domains are prepared at t = 0.

    ``parallel`` is |j1, j1> (x) |j2, j2>, ``antiparallel`` is
    |j1, j1> (x) |j2, -j2>, ``custom`` is |j1, m1> (x) |j2, m2>, and
    ``coupled`` is the total-spin eigenstate |J, M> (not a product state).
    """

    config: ConfigKind = Field(default=ConfigKind.ANTIPARALLEL, description="Preparation kind")
    m1: Optional[float] = Field(default=None, description="m1 for custom (half-integer)")
    m2: Optional[float] = Field(default=None, description="m2 for custom (half-integer)")
    total_j: Optional[float] = Field(default=None, description="J for coupled (half-integer)")
    total_m: Optional[float] = Field(default=None, description="M for coupled (half-integer)")

    @model_validator(mode="after")
    def _check_fields(self) -> "InitialConfig":
        custom = (self.m1, self.m2)
        coupled = (self.total_j, self.total_m)
        if self.config is ConfigKind.CUSTOM:
            if None in custom:
                raise ValueError("custom configuration requires m1 and m2")
            for value in custom:
                to_twice(value)
        elif any(v is not None for v in custom):
            raise ValueError(f"m1/m2 are only valid for custom, not {self.config.value}")
        if self.config is ConfigKind.COUPLED:
            if None in coupled:
                raise ValueError("coupled configuration requires total_j and total_m")
            for value in coupled:
                to_twice(value)
        elif any(v is not None for v in coupled):
            raise ValueError(f"total_j/total_m are only valid for coupled, not {self.config.value}")
        return self

    @property
    def is_product(self) -> bool:
        return self.config is not ConfigKind.COUPLED

    def product_index(self, domains: DomainPair) -> ProductBasisIndex:
        """
        The product basis state this configuration prepares.

        Raises:
            UnsupportedInputError: For a coupled configuration
            SpinDomainError: If m1 or m2 is out of range for the domains
        """
        if self.config is ConfigKind.PARALLEL:
            return ProductBasisIndex(domains.n1, domains.n2)
        if self.config is ConfigKind.ANTIPARALLEL:
            return ProductBasisIndex(domains.n1, -domains.n2)
        if self.config is ConfigKind.CUSTOM:
            index = ProductBasisIndex(to_twice(self.m1), to_twice(self.m2))
            index.validate(domains)
            return index
        raise UnsupportedInputError("A coupled |J, M> configuration is not a product state")

    def coupled_numbers(self, domains: DomainPair) -> Tuple[int, int]:
        """
        (2J, 2M) of a coupled configuration.

        Raises:
            UnsupportedInputError: For product configurations
            SpinDomainError: If J violates the triangle rule or |M| > J
        """
        if self.config is not ConfigKind.COUPLED:
            raise UnsupportedInputError(f"{self.config.value} is a product configuration")
        two_J, two_M = to_twice(self.total_j), to_twice(self.total_m)
        n1, n2 = domains.n1, domains.n2
        if not abs(n1 - n2) <= two_J <= n1 + n2 or (n1 + n2 - two_J) % 2:
            raise SpinDomainError(
                f"J={half(two_J)} violates the triangle rule for j1={half(n1)}, j2={half(n2)}"
            )
        check_projection(two_J, two_M)
        return two_J, two_M

    def validate_for(self, domains: DomainPair) -> None:
        """Raises SpinDomainError when the configuration does not fit the domains."""
        if self.is_product:
            self.product_index(domains)
        else:
            self.coupled_numbers(domains)

    @classmethod
    def parallel(cls) -> "InitialConfig":
        return cls(config=ConfigKind.PARALLEL)

    @classmethod
    def antiparallel(cls) -> "InitialConfig":
        return cls(config=ConfigKind.ANTIPARALLEL)

    @classmethod
    def custom(cls, m1: float, m2: float) -> "InitialConfig":
        return cls(config=ConfigKind.CUSTOM, m1=m1, m2=m2)

    @classmethod
    def coupled(cls, total_j: float, total_m: float) -> "InitialConfig":
        return cls(config=ConfigKind.COUPLED, total_j=total_j, total_m=total_m)
