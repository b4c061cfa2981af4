"""
The shared bosonic reservoir.
"""

import math

import numpy as np
from pydantic import Field
from scipy import constants

from domain_relaxation.core.base_models import ValueModel


class ReservoirSpec(ValueModel):
    """Reservoir temperature, resonant spin frequency and collective damping rate."""

    temperature_k: float = Field(default=0.0, ge=0.0, description="Reservoir temperature in kelvin")
    spin_frequency_hz: float = Field(default=1.0e10, gt=0.0, description="omega_s / 2 pi in hertz")
    damping_rate: float = Field(default=0.01, gt=0.0, description="gamma in s^-1")

    @classmethod
    def from_millikelvin(
        cls,
        temperature_mk: float,
        spin_frequency_hz: float = 1.0e10,
        damping_rate: float = 0.01
    ) -> "ReservoirSpec":
        return cls(
            temperature_k=temperature_mk / 1000.0,
            spin_frequency_hz=spin_frequency_hz,
            damping_rate=damping_rate
        )

    @property
    def reduced_energy(self) -> float:
        """hbar omega_s / k_B T; infinite at T = 0."""
        if self.temperature_k == 0.0:
            return math.inf
        omega = 2.0 * math.pi * self.spin_frequency_hz
        return constants.hbar * omega / (constants.k * self.temperature_k)

    @property
    def thermal_occupation(self) -> float:
        """Bose-Einstein occupation n = 1 / (exp(hbar omega / k T) - 1); exactly 0 at T = 0."""
        x = self.reduced_energy
        if math.isinf(x):
            return 0.0
        with np.errstate(over="ignore"):
            return float(1.0 / np.expm1(x))

    @property
    def boltzmann_factor(self) -> float:
        """exp(-hbar omega / k T) = n / (n + 1), the up/down rate ratio."""
        nbar = self.thermal_occupation
        return nbar / (nbar + 1.0)

    @property
    def emission_rate(self) -> float:
        """gamma (n + 1) in s^-1."""
        return self.damping_rate * (self.thermal_occupation + 1.0)

    @property
    def absorption_rate(self) -> float:
        """gamma n in s^-1."""
        return self.damping_rate * self.thermal_occupation
