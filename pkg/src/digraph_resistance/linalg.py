"""
Exact dense linear algebra over the rationals.

Every entry is a `fractions.Fraction`, so all results are exact and comparisons
need no tolerance. Matrices are immutable.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import TYPE_CHECKING, Annotated, Iterable, Iterator, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, PlainSerializer

from digraph_resistance.core import ShapeError, SingularMatrixError, format_rat

if TYPE_CHECKING:
    from typing import Any


def _to_rat(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        msg = f"Refusing to interpret the boolean {value!r} as a matrix entry."
        raise TypeError(msg)
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value)
    msg = (
        f"Matrix entries must be integers, strings or Fractions. Got {type(value)}, "
        "which cannot be converted exactly."
    )
    raise TypeError(msg)


class RatMatrix:
    """
    An immutable dense matrix of exact rationals.

    Element access follows numpy (0-based). Functions in this module that take
    row or column ids, such as `delete`, use the 1-based ids of the matrix
    notation instead.
    """

    __slots__ = ("_data",)
    __hash__ = None  # type: ignore[assignment]

    def __init__(self, data: np.ndarray | Sequence[Sequence[Any]]):
        arr = np.asarray(data, dtype=object)
        if arr.ndim != 2:
            msg = f"A RatMatrix must be 2-dimensional. Got an array with {arr.ndim} dimensions."
            raise ShapeError(msg)
        out = np.empty(arr.shape, dtype=object)
        for idx in np.ndindex(arr.shape):
            out[idx] = _to_rat(arr[idx])
        out.flags.writeable = False
        self._data = out

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> RatMatrix:
        # entries are already Fractions
        obj = cls.__new__(cls)
        arr = np.array(arr, dtype=object)
        arr.flags.writeable = False
        obj._data = arr
        return obj

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]], cols: int | None = None) -> RatMatrix:
        if len(rows) == 0:
            return cls.zeros(0, 0 if cols is None else cols)
        return cls(rows)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> RatMatrix:
        arr = np.empty((rows, cols), dtype=object)
        arr.fill(Fraction(0))
        return cls._wrap(arr)

    @classmethod
    def ones(cls, rows: int, cols: int) -> RatMatrix:
        arr = np.empty((rows, cols), dtype=object)
        arr.fill(Fraction(1))
        return cls._wrap(arr)

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        arr = np.empty((n, n), dtype=object)
        for i, j in np.ndindex(n, n):
            arr[i, j] = Fraction(int(i == j))
        return cls._wrap(arr)

    @property
    def data(self) -> np.ndarray:
        """
        A read-only view of the underlying object array.
        """
        return self._data

    @property
    def shape(self) -> tuple[int, int]:
        return self._data.shape  # type: ignore[return-value]

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def T(self) -> RatMatrix:
        return RatMatrix._wrap(self._data.T)

    def transpose(self) -> RatMatrix:
        return self.T

    def __getitem__(self, key: Any) -> Any:
        out = self._data[key]
        if isinstance(out, np.ndarray):
            if out.ndim == 2:
                return RatMatrix._wrap(out)
            return tuple(out.tolist())
        return out

    def __iter__(self) -> Iterator[tuple[Fraction, ...]]:
        for row in self._data:
            yield tuple(row.tolist())

    def tolist(self) -> list[list[Fraction]]:
        return [list(row) for row in self._data.tolist()] if self.rows else []

    def to_strings(self) -> list[list[str]]:
        """
        Entries rendered as "p/q" strings, row by row.
        """
        return [[format_rat(x) for x in row] for row in self.tolist()]

    def _check_same_shape(self, other: RatMatrix, op: str) -> None:
        if self.shape != other.shape:
            msg = f"Cannot {op} matrices with shapes {self.shape} and {other.shape}."
            raise ShapeError(msg)

    def __add__(self, other: RatMatrix) -> RatMatrix:
        self._check_same_shape(other, "add")
        return RatMatrix._wrap(self._data + other._data)

    def __sub__(self, other: RatMatrix) -> RatMatrix:
        self._check_same_shape(other, "subtract")
        return RatMatrix._wrap(self._data - other._data)

    def __neg__(self) -> RatMatrix:
        return RatMatrix._wrap(-self._data)

    def __mul__(self, scalar: int | Fraction) -> RatMatrix:
        if isinstance(scalar, RatMatrix):
            msg = "Use `@` for matrix products."
            raise TypeError(msg)
        return RatMatrix._wrap(self._data * _to_rat(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar: int | Fraction) -> RatMatrix:
        return RatMatrix._wrap(self._data / _to_rat(scalar))

    def __matmul__(self, other: RatMatrix) -> RatMatrix:
        if self.cols != other.rows:
            msg = f"Cannot multiply a {self.shape} matrix by a {other.shape} matrix."
            raise ShapeError(msg)
        if self.cols == 0:
            return RatMatrix.zeros(self.rows, other.cols)
        return RatMatrix(self._data @ other._data)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.all(self._data == other._data))

    def __repr__(self) -> str:
        body = "; ".join(", ".join(row) for row in self.to_strings())
        return f"RatMatrix({self.rows}x{self.cols}: [{body}])"

    def row_sums(self) -> tuple[Fraction, ...]:
        return tuple(sum(row, Fraction(0)) for row in self.tolist())

    def col_sums(self) -> tuple[Fraction, ...]:
        return self.T.row_sums()

    def diagonal(self) -> tuple[Fraction, ...]:
        return tuple(self._data[i, i] for i in range(min(self.shape)))

    def take(self, row_order: Sequence[int], col_order: Sequence[int]) -> RatMatrix:
        """
        Select (and reorder) rows and columns by 0-based position.
        """
        sub = self._data[np.ix_(list(row_order), list(col_order))]
        return RatMatrix._wrap(sub.reshape(len(row_order), len(col_order)))


class RankFactorization(BaseModel):
    """
    A full-rank factorization `F @ G` of a matrix of rank `r`.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    F: RatMatrix
    G: RatMatrix
    r: int


def _integer_rows(a: RatMatrix) -> tuple[list[list[int]], int]:
    """
    Clear denominators row by row. Returns the integer rows and the product of
    the row multipliers.
    """
    rows: list[list[int]] = []
    scale = 1
    for row in a.tolist():
        mult = math.lcm(*(x.denominator for x in row)) if row else 1
        rows.append([int(x * mult) for x in row])
        scale *= mult
    return rows, scale


def det(a: RatMatrix) -> Fraction:
    """
    Exact determinant by fraction-free (Bareiss) elimination.

    The matrix is first scaled to an integer matrix by clearing the denominators of
    each row; the integer determinant is then divided by the product of the row
    scales. The determinant of a 0x0 matrix is 1.

    Parameters
    ----------
    a: RatMatrix
        A square matrix.

    Returns
    -------
    Fraction
    """
    if not a.is_square:
        msg = f"The determinant is only defined for square matrices. Got shape {a.shape}."
        raise ShapeError(msg)
    n = a.rows
    if n == 0:
        return Fraction(1)
    rows, scale = _integer_rows(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if rows[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            rows[k], rows[swap] = rows[swap], rows[k]
            sign = -sign
        pivot = rows[k][k]
        for i in range(k + 1, n):
            row_i = rows[i]
            factor = row_i[k]
            row_k = rows[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - factor * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return Fraction(sign * rows[n - 1][n - 1], scale)


def inverse(a: RatMatrix) -> RatMatrix:
    """
    Exact inverse by Gauss-Jordan elimination over the rationals.
    """
    if not a.is_square:
        msg = f"Only square matrices can be inverted. Got shape {a.shape}."
        raise ShapeError(msg)
    n = a.rows
    x = a.tolist()
    y = RatMatrix.identity(n).tolist()
    for i in range(n):
        pivot_row = next((j for j in range(i, n) if x[j][i] != 0), None)
        if pivot_row is None:
            raise SingularMatrixError("matrix is singular")
        if pivot_row != i:
            x[i], x[pivot_row] = x[pivot_row], x[i]
            y[i], y[pivot_row] = y[pivot_row], y[i]
        p = x[i][i]
        x[i] = [v / p for v in x[i]]
        y[i] = [v / p for v in y[i]]
        for j in range(n):
            if j != i and x[j][i] != 0:
                f = x[j][i]
                x[j] = [u - f * v for u, v in zip(x[j], x[i])]
                y[j] = [u - f * v for u, v in zip(y[j], y[i])]
    return RatMatrix.from_rows(y, cols=n)


def delete(a: RatMatrix, rows_to_delete: Iterable[int], cols_to_delete: Iterable[int]) -> RatMatrix:
    """
    The submatrix `A[S1^c, S2^c]` obtained by deleting the rows in `S1` and the columns
    in `S2`. Ids are 1-based; the remaining rows and columns keep their relative order.
    """
    drop_rows = set(rows_to_delete)
    drop_cols = set(cols_to_delete)
    for label, ids, bound in (("row", drop_rows, a.rows), ("column", drop_cols, a.cols)):
        bad = sorted(i for i in ids if not 1 <= i <= bound)
        if bad:
            msg = f"{label} ids {bad} are out of range for a matrix with {bound} {label}s."
            raise ShapeError(msg)
    keep_rows = [i for i in range(a.rows) if i + 1 not in drop_rows]
    keep_cols = [j for j in range(a.cols) if j + 1 not in drop_cols]
    return a.take(keep_rows, keep_cols)


def rref(a: RatMatrix) -> tuple[RatMatrix, tuple[int, ...]]:
    """
    Reduced row echelon form and the 0-based pivot columns.
    """
    m = a.tolist()
    pivots: list[int] = []
    lead = 0
    for col in range(a.cols):
        pivot_row = next((r for r in range(lead, a.rows) if m[r][col] != 0), None)
        if pivot_row is None:
            continue
        m[lead], m[pivot_row] = m[pivot_row], m[lead]
        p = m[lead][col]
        m[lead] = [v / p for v in m[lead]]
        for r in range(a.rows):
            if r != lead and m[r][col] != 0:
                f = m[r][col]
                m[r] = [u - f * v for u, v in zip(m[r], m[lead])]
        pivots.append(col)
        lead += 1
        if lead == a.rows:
            break
    return RatMatrix.from_rows(m, cols=a.cols), tuple(pivots)


def rank(a: RatMatrix) -> int:
    return len(rref(a)[1])


def rank_factorization(a: RatMatrix) -> RankFactorization:
    """
    Full-rank factorization from the reduced row echelon form: `G` holds the nonzero
    rows of the RREF and `F` holds the columns of `a` at the pivot positions.
    """
    reduced, pivots = rref(a)
    r = len(pivots)
    f = a.take(range(a.rows), pivots)
    g = reduced.take(range(r), range(a.cols))
    return RankFactorization(F=f, G=g, r=r)


def pinv_general(a: RatMatrix) -> RatMatrix:
    """
    Exact Moore-Penrose inverse of any rational matrix.

    With a full-rank factorization `A = F G` the pseudoinverse is
    `G' (G G')^-1 (F' F)^-1 F'`; both inverted matrices are positive definite.
    The zero matrix maps to the zero matrix of transposed shape.
    """
    fac = rank_factorization(a)
    if fac.r == 0:
        return RatMatrix.zeros(a.cols, a.rows)
    f, g = fac.F, fac.G
    return g.T @ inverse(g @ g.T) @ inverse(f.T @ f) @ f.T


def penrose_check(a: RatMatrix, x: RatMatrix) -> bool:
    """
    Whether `x` satisfies the four Penrose equations for `a` exactly, with the
    transpose in place of the conjugate transpose.
    """
    if x.shape != (a.cols, a.rows):
        msg = (
            f"A candidate pseudoinverse of a {a.shape} matrix must have shape "
            f"{(a.cols, a.rows)}. Got {x.shape}."
        )
        raise ShapeError(msg)
    ax = a @ x
    xa = x @ a
    return ax @ a == a and xa @ x == x and ax.T == ax and xa.T == xa


def block_diag(a: RatMatrix, c: RatMatrix) -> RatMatrix:
    """
    The block matrix `[[a, 0], [0, c]]`.
    """
    out = np.empty((a.rows + c.rows, a.cols + c.cols), dtype=object)
    out.fill(Fraction(0))
    out[: a.rows, : a.cols] = a.data
    out[a.rows :, a.cols :] = c.data
    return RatMatrix._wrap(out)


def block_diag_pinv(a: RatMatrix, c: RatMatrix) -> RatMatrix:
    """
    Pseudoinverse of `[[a, 0], [0, c]]` assembled blockwise as `diag(pinv(a), pinv(c))`.
    """
    return block_diag(pinv_general(a), pinv_general(c))


def _matrix_strings(m: RatMatrix) -> list[list[str]]:
    return m.to_strings()


# pydantic field type: kept as a RatMatrix in python, nested "p/q" lists in JSON
Matrix = Annotated[
    RatMatrix,
    PlainSerializer(_matrix_strings, return_type=list, when_used="json"),
]
