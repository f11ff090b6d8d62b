"""Cantor-integer sequences: exact values, extremal constants, limit function and summation."""
from .core import (
    BaseConversionMap,
    CantorSystem,
    DigitWord,
    QuadraticFamily,
    cantor_table,
    cantor_value,
    delta_cantor,
    from_digits,
    gawron_ulas,
    make_system,
    quadratic_system,
    ratio,
    square_digits,
    ternary_cantor,
    to_digits,
    validate_system,
)
from .errors import CantorError
from .hp import DEFAULT_PRECISION, Estimate, PowerRatio, PowerScale

__version__ = "0.1.0"

__all__ = [
    "BaseConversionMap",
    "CantorSystem",
    "DigitWord",
    "QuadraticFamily",
    "cantor_table",
    "cantor_value",
    "delta_cantor",
    "from_digits",
    "gawron_ulas",
    "make_system",
    "quadratic_system",
    "ratio",
    "square_digits",
    "ternary_cantor",
    "to_digits",
    "validate_system",
    "CantorError",
    "DEFAULT_PRECISION",
    "Estimate",
    "PowerRatio",
    "PowerScale",
]
