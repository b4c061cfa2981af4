"""
Text formatting helpers for reports.
"""

from fractions import Fraction
import math
from typing import Union

Number = Union[int, float, Fraction]


def format_half(value: Number) -> str:
    """Half-integer as '3/2', '-1' or '0'."""
    exact = Fraction(value).limit_denominator(2)
    if exact.denominator == 1:
        return str(exact.numerator)
    return f"{exact.numerator}/{exact.denominator}"


def format_float(value: float) -> str:
    """17 significant digits; infinities and NaN spelled out."""
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.17g}"


def format_temperature_k(value: float) -> str:
    """Kelvin with millikelvin resolution, 'inf' at zero polarization."""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if value == 0.0:
        return "0 K"
    return f"{value * 1000.0:.6g} mK"
