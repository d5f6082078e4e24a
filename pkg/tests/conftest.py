from __future__ import annotations

from fractions import Fraction

import pytest

from digraph_resistance.digraph import Digraph
from digraph_resistance.generators import fixture


@pytest.fixture(scope="function")
def digraph(request) -> Digraph:
    """
    A built-in digraph, selected by name through indirect parametrization.
    """
    return fixture(request.param)


def sixteenths(rows: list[list[int]]) -> list[list[Fraction]]:
    return [[Fraction(x, 16) for x in row] for row in rows]


# pseudoinverse of the Laplacian of FIG_D, times 16
FIG_D_PINV_16 = [
    [13, -1, 5, 3, -5, -3, -5, -7],
    [5, 7, 5, 3, -5, -3, -5, -7],
    [-1, 1, 7, 5, -3, -1, -3, -5],
    [-5, -3, -5, 9, 1, 3, 1, -1],
    [3, 5, 3, 1, 9, -5, -7, -9],
    [-3, -1, -3, -5, 3, 5, 3, 1],
    [-7, -5, -7, -9, -1, 1, 15, 13],
    [-5, -3, -5, -7, 1, 3, 1, 15],
]

FIG_D_PINV_DECIMAL = [
    ["0.8125", "-0.0625", "0.3125", "0.1875", "-0.3125", "-0.1875", "-0.3125", "-0.4375"],
    ["0.3125", "0.4375", "0.3125", "0.1875", "-0.3125", "-0.1875", "-0.3125", "-0.4375"],
    ["-0.0625", "0.0625", "0.4375", "0.3125", "-0.1875", "-0.0625", "-0.1875", "-0.3125"],
    ["-0.3125", "-0.1875", "-0.3125", "0.5625", "0.0625", "0.1875", "0.0625", "-0.0625"],
    ["0.1875", "0.3125", "0.1875", "0.0625", "0.5625", "-0.3125", "-0.4375", "-0.5625"],
    ["-0.1875", "-0.0625", "-0.1875", "-0.3125", "0.1875", "0.3125", "0.1875", "0.0625"],
    ["-0.4375", "-0.3125", "-0.4375", "-0.5625", "-0.0625", "0.0625", "0.9375", "0.8125"],
    ["-0.3125", "-0.1875", "-0.3125", "-0.4375", "0.0625", "0.1875", "0.0625", "0.9375"],
]

FIG_D1_PINV_DECIMAL = [
    ["0.6389", "-0.1944", "0.1389", "-0.0278", "-0.3611", "-0.1944"],
    ["0.1389", "0.3056", "0.1389", "-0.0278", "-0.3611", "-0.1944"],
    ["-0.1944", "-0.0278", "0.3056", "0.1389", "-0.1944", "-0.0278"],
    ["-0.3611", "-0.1944", "-0.3611", "0.4722", "0.1389", "0.3056"],
    ["-0.0278", "0.1389", "-0.0278", "-0.1944", "0.4722", "-0.3611"],
    ["-0.1944", "-0.0278", "-0.1944", "-0.3611", "0.3056", "0.4722"],
]

CEX_PINV = [
    [Fraction(1, 5), Fraction(-11, 40), Fraction(-1, 20), Fraction(-1, 40)],
    [Fraction(0), Fraction(5, 8), Fraction(-1, 4), Fraction(-1, 8)],
    [Fraction(-1, 5), Fraction(-19, 40), Fraction(11, 20), Fraction(-9, 40)],
    [Fraction(0), Fraction(1, 8), Fraction(-1, 4), Fraction(3, 8)],
]

CEX_PINV_DECIMAL = [
    ["0.2000", "-0.2750", "-0.0500", "-0.0250"],
    ["0.0000", "0.6250", "-0.2500", "-0.1250"],
    ["-0.2000", "-0.4750", "0.5500", "-0.2250"],
    ["0.0000", "0.1250", "-0.2500", "0.3750"],
]


def seeded_balanced(seed: int, max_n: int = 12) -> Digraph:
    """
    A connected balanced digraph with between 2 and `max_n` vertices, determined by `seed`.
    """
    from digraph_resistance.generators import SplitMix64, _piece_arc_count, gen_balanced_random

    rng = SplitMix64(seed)
    n = rng.randint(2, max_n)
    return gen_balanced_random(n, _piece_arc_count(rng, n), rng.next_u64())
