from __future__ import annotations

import math
from fractions import Fraction
from typing import Annotated, Union

from pydantic import PlainSerializer, PlainValidator

Rat = Fraction
Distance = Union[int, float]
JSON = Union[dict[str, "JSON"], list["JSON"], str, int, float, bool, None]

# unreachable vertex pairs
INF: float = math.inf
DEFAULT_PRECISION = 4


class DigraphResistanceError(Exception):
    """
    Base class for every error raised by this package.
    """


class InvalidDigraphError(DigraphResistanceError, ValueError):
    pass


class DigraphFormatError(InvalidDigraphError):
    """
    A graph file could not be parsed. `line` is the 1-based line of an edge list,
    or the 1-based arc index of a JSON document.
    """

    def __init__(self, line: int | None, reason: str):
        self.line = line
        self.reason = reason
        if line is None:
            super().__init__(reason)
        else:
            super().__init__(f"line {line}: {reason}")


class NotConnectedError(DigraphResistanceError, ValueError):
    pass


class NotStronglyConnectedError(DigraphResistanceError, ValueError):
    pass


class NotBalancedError(DigraphResistanceError, ValueError):
    pass


class ShapeError(DigraphResistanceError, ValueError):
    pass


class SingularMatrixError(DigraphResistanceError, ArithmeticError):
    pass


class IdentityViolationError(DigraphResistanceError, RuntimeError):
    """
    An identity that holds for every valid input failed under exact arithmetic.
    """


class GeneratorError(DigraphResistanceError, ValueError):
    pass


def as_rat(value: int | str | Fraction) -> Fraction:
    """
    Coerce an integer, a "p/q" string or a `Fraction` into a `Fraction`.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        msg = f"Cannot interpret {value!r} as an exact rational."
        raise TypeError(msg)
    return Fraction(value)


def format_rat(value: Fraction | int) -> str:
    """
    Render a rational as "p/q", or "p" when the denominator is 1.
    """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value: Fraction | int | float, precision: int = DEFAULT_PRECISION) -> str:
    """
    Render a rational with `precision` decimal places, rounding half to even.

    The rounding is done on the exact value, so ties are decided without any
    binary floating point error. Infinite distances render as "inf".

    Parameters
    ----------
    value: Fraction | int | float
        The value to render. Floats are only accepted for infinity.
    precision: int, default is 4
        Number of decimal places, at least 1.

    Returns
    -------
    str
    """
    if precision < 1:
        msg = f"precision must be at least 1. Got {precision}."
        raise ValueError(msg)
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        value = Fraction(value)
    scaled = round(Fraction(value) * 10**precision)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(precision + 1, "0")
    return f"{sign}{digits[:-precision]}.{digits[-precision:]}"


def format_distance(value: Distance) -> str | int:
    """
    Serialize a shortest-path length: integers pass through, infinity becomes "inf".
    """
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return int(value)


# exact in python mode, "p/q" in JSON
Rational = Annotated[
    Fraction,
    PlainValidator(as_rat),
    PlainSerializer(format_rat, return_type=str, when_used="json"),
]
