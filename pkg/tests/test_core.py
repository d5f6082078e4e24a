from __future__ import annotations

from fractions import Fraction

import pytest

from digraph_resistance.core import (
    INF,
    DigraphFormatError,
    DigraphResistanceError,
    IdentityViolationError,
    InvalidDigraphError,
    NotBalancedError,
    ShapeError,
    SingularMatrixError,
    as_rat,
    format_decimal,
    format_distance,
    format_rat,
)


@pytest.mark.parametrize(
    "value, expected",
    [(Fraction(5, 8), "5/8"), (Fraction(-23, 20), "-23/20"), (Fraction(4, 2), "2"), (0, "0")],
)
def test_format_rat(value: Fraction | int, expected: str) -> None:
    assert format_rat(value) == expected


@pytest.mark.parametrize(
    "value, precision, expected",
    [
        (Fraction(13, 16), 4, "0.8125"),
        (Fraction(-1, 36), 4, "-0.0278"),
        (Fraction(23, 20), 4, "1.1500"),
        (Fraction(2, 3), 4, "0.6667"),
        (Fraction(0), 4, "0.0000"),
        # ties round to even on the exact value
        (Fraction(1, 8), 2, "0.12"),
        (Fraction(3, 8), 2, "0.38"),
        (Fraction(-1, 8), 2, "-0.12"),
        (Fraction(5, 2), 1, "2.5"),
        (Fraction(-1, 3), 1, "-0.3"),
    ],
)
def test_format_decimal(value: Fraction, precision: int, expected: str) -> None:
    assert format_decimal(value, precision) == expected


def test_format_decimal_infinity() -> None:
    assert format_decimal(INF) == "inf"


def test_format_decimal_rejects_zero_precision() -> None:
    with pytest.raises(ValueError, match="precision"):
        format_decimal(Fraction(1, 2), 0)


def test_format_distance() -> None:
    assert format_distance(3) == 3
    assert format_distance(INF) == "inf"


@pytest.mark.parametrize("value", [3, "3/4", Fraction(3, 4)])
def test_as_rat(value: int | str | Fraction) -> None:
    assert as_rat(value) == Fraction(value)


@pytest.mark.parametrize("value", [True, 0.5, None])
def test_as_rat_rejects_inexact(value: object) -> None:
    with pytest.raises(TypeError):
        as_rat(value)  # type: ignore[arg-type]


def test_format_error_line_prefix() -> None:
    err = DigraphFormatError(7, "self-loop (2, 2) is not allowed")
    assert err.line == 7
    assert str(err) == "line 7: self-loop (2, 2) is not allowed"
    assert str(DigraphFormatError(None, "empty")) == "empty"


@pytest.mark.parametrize(
    "error, builtin",
    [
        (InvalidDigraphError, ValueError),
        (DigraphFormatError, InvalidDigraphError),
        (NotBalancedError, ValueError),
        (ShapeError, ValueError),
        (SingularMatrixError, ArithmeticError),
        (IdentityViolationError, RuntimeError),
    ],
)
def test_error_hierarchy(error: type[Exception], builtin: type[Exception]) -> None:
    assert issubclass(error, builtin)
    assert issubclass(error, DigraphResistanceError)
