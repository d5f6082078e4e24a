"""
Laplacians, spanning arborescence counts, the partitioned pseudoinverse of a
balanced Laplacian, and resistance distances.
"""

from __future__ import annotations

import logging
import warnings
from fractions import Fraction
from typing import TYPE_CHECKING, Dict, Literal, Tuple

from pydantic import BaseModel, ConfigDict

from digraph_resistance.core import (
    IdentityViolationError,
    InvalidDigraphError,
    NotBalancedError,
    NotConnectedError,
    NotStronglyConnectedError,
    Rational,
)
from digraph_resistance.digraph import (
    Digraph,
    is_balanced,
    is_connected,
    is_strongly_connected,
    one_point_union,
)
from digraph_resistance.linalg import (
    Matrix,
    RatMatrix,
    delete,
    det,
    inverse,
    penrose_check,
    pinv_general,
)

if TYPE_CHECKING:
    from typing import Sequence

logger = logging.getLogger(__name__)


class PartitionData(BaseModel):
    """
    The ingredients of the partitioned pseudoinverse for one pivot vertex.

    With the pivot moved to the last position the Laplacian reads
    `[[B, -B e], [-e' B, e' B e]]`; `Cmat` is `B^-1`, `x` its row sums, `y` its column
    sums and `x0 = e' C e / N^2`.

    Attributes
    ----------
    pivot: int
        The vertex removed last.
    order: tuple[int, ...]
        Vertex ids in the permuted order; the pivot is the final entry. Row `a` of
        `Cmat` belongs to vertex `order[a]`.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    pivot: int
    order: Tuple[int, ...]
    Cmat: Matrix
    x: Tuple[Rational, ...]
    y: Tuple[Rational, ...]
    x0: Rational
    N: int

    def position(self, v: int) -> int | None:
        """
        Row of `Cmat` for vertex `v`, or `None` for the pivot.
        """
        if v == self.pivot:
            return None
        return self.order.index(v)

    def c(self, u: int, v: int) -> Fraction:
        """
        `C[u, v]` by vertex id; zero when either vertex is the pivot.
        """
        a, b = self.position(u), self.position(v)
        if a is None or b is None:
            return Fraction(0)
        return self.Cmat[a, b]

    def row_sum(self, v: int) -> Fraction:
        a = self.position(v)
        return Fraction(0) if a is None else self.x[a]

    def col_sum(self, v: int) -> Fraction:
        a = self.position(v)
        return Fraction(0) if a is None else self.y[a]


class ResistanceResult(BaseModel):
    """
    Laplacian, its Moore-Penrose inverse, and the resistance matrix of a digraph.

    `kappa` is only populated for balanced digraphs.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lap: Matrix
    lap_pinv: Matrix
    rmat: Matrix
    kappa: Rational | None
    balanced_path_used: bool

    def r(self, i: int, j: int) -> Fraction:
        """
        The resistance distance from vertex `i` to vertex `j` (1-based).
        """
        return self.rmat[i - 1, j - 1]


class GlueQuantities(BaseModel):
    """
    Both sides of the gluing identities for a pair `(i, j)` of a one-point union
    `D = D1 ∪ D2`.

    `case` is "endpoint" when one of `i`, `j` is the glue vertex and "interior"
    otherwise. `c_term` is `c_ii + c_jj - 2 c_ij` over `C = B^-1` with the glue vertex as
    pivot (entries involving the pivot read as zero), so in the endpoint case it reduces
    to the diagonal entry of the other vertex.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    case: Literal["endpoint", "interior"]
    i: int
    j: int
    glue: int
    n: int
    k: int
    N: int
    r_D: Rational
    r_D1: Rational
    c_terms: Dict[str, Rational]
    pair_formula_D: Rational
    pair_formula_D1: Rational
    glued: Rational
    symmetric_term: Rational
    cofactor_ratio: Rational


def laplacian(d: Digraph) -> RatMatrix:
    """
    The out-degree Laplacian: outdegrees on the diagonal, -1 for every arc.
    """
    rows = [[0] * d.n for _ in range(d.n)]
    for u, v in d.arcs:
        rows[u - 1][u - 1] += 1
        rows[u - 1][v - 1] = -1
    return RatMatrix(rows)


def kappa(d: Digraph) -> Fraction:
    """
    Number of spanning arborescences rooted at any vertex of a connected balanced
    digraph, computed as `det(L[{1}^c, {1}^c])`.

    The cofactor at vertex n is computed as well and must agree.
    """
    if not is_balanced(d):
        raise NotBalancedError("kappa requires balanced digraph")
    lap = laplacian(d)
    first = det(delete(lap, {1}, {1}))
    last = det(delete(lap, {d.n}, {d.n}))
    if first != last:
        msg = (
            f"Root independence failed: the cofactor at vertex 1 is {first} but the "
            f"cofactor at vertex {d.n} is {last}."
        )
        raise IdentityViolationError(msg)
    return first


def _permuted_order(d: Digraph, pivot: int) -> tuple[int, ...]:
    return tuple(v for v in d.vertices if v != pivot) + (pivot,)


def partition_data(d: Digraph, pivot: int | None = None) -> PartitionData:
    """
    Partition the Laplacian of a connected balanced digraph around `pivot`.

    Parameters
    ----------
    d: Digraph
        A connected, balanced digraph.
    pivot: int | None, default is None
        The vertex moved to the last position. Defaults to vertex n.

    Returns
    -------
    PartitionData
    """
    pivot = d.n if pivot is None else pivot
    if not d.has_vertex(pivot):
        msg = f"Pivot {pivot} is not a vertex of a digraph on 1..{d.n}."
        raise InvalidDigraphError(msg)
    order = _permuted_order(d, pivot)
    positions = [v - 1 for v in order]
    lap = laplacian(d).take(positions, positions)
    m = d.n - 1
    b = lap.take(range(m), range(m))
    e = RatMatrix.ones(m, 1)
    expected = _assemble(b, -(b @ e), -(e.T @ b), e.T @ b @ e)
    if lap != expected:
        msg = (
            "The Laplacian does not have the partitioned form [[B, -Be], [-e'B, e'Be]]; "
            "its row and column sums are not all zero, so the digraph is not balanced."
        )
        raise NotBalancedError(msg)
    logger.debug("partitioning around pivot %d", pivot)
    c = inverse(b)
    x = c.row_sums()
    y = c.col_sums()
    x0 = sum(x, Fraction(0)) / d.n**2
    return PartitionData(pivot=pivot, order=order, Cmat=c, x=x, y=y, x0=x0, N=d.n)


def _assemble(tl: RatMatrix, tr: RatMatrix, bl: RatMatrix, br: RatMatrix) -> RatMatrix:
    top = [list(a) + list(b) for a, b in zip(tl.tolist(), tr.tolist())]
    bottom = [list(a) + list(b) for a, b in zip(bl.tolist(), br.tolist())]
    return RatMatrix(top + bottom)


def pinv_from_partition(part: PartitionData) -> RatMatrix:
    """
    Assemble the pseudoinverse of the permuted Laplacian from its partition:

        [[C - e y'/N - x e'/N, -x/N], [-y'/N, 0]] + x0 * J
    """
    m, n_ = part.N - 1, part.N
    x, y, x0 = part.x, part.y, part.x0
    c = part.Cmat
    rows = [
        [c[a, b] - y[b] / n_ - x[a] / n_ + x0 for b in range(m)] + [-x[a] / n_ + x0]
        for a in range(m)
    ]
    rows.append([-y[b] / n_ + x0 for b in range(m)] + [x0])
    return RatMatrix(rows)


def _unpermute(permuted: RatMatrix, order: Sequence[int]) -> RatMatrix:
    inverse_order = sorted(range(len(order)), key=lambda a: order[a])
    return permuted.take(inverse_order, inverse_order)


def pinv_balanced(d: Digraph, pivot: int | None = None) -> RatMatrix:
    """
    Moore-Penrose inverse of the Laplacian of a connected balanced digraph through
    the partitioned formula, certified against the four Penrose equations.
    """
    part = partition_data(d, pivot)
    result = _unpermute(pinv_from_partition(part), part.order)
    if not penrose_check(laplacian(d), result):
        msg = f"The partitioned pseudoinverse around pivot {part.pivot} fails the Penrose equations."
        raise IdentityViolationError(msg)
    return result


def resistance_matrix(lap_pinv: RatMatrix) -> RatMatrix:
    diag = lap_pinv.diagonal()
    n = lap_pinv.rows
    return RatMatrix(
        [[diag[i] + diag[j] - 2 * lap_pinv[i, j] for j in range(n)] for i in range(n)]
    )


def resistance(d: Digraph) -> ResistanceResult:
    """
    Resistance distances `r_ij = l_ii + l_jj - 2 l_ij` over the pseudoinverse of the
    Laplacian.

    Balanced digraphs take the partitioned path (pivot n) and report `kappa`;
    unbalanced strongly connected digraphs fall back to the general pseudoinverse.

    Parameters
    ----------
    d: Digraph
        A strongly connected digraph.

    Returns
    -------
    ResistanceResult
    """
    if not is_strongly_connected(d):
        msg = "Resistance distances are only defined here for strongly connected digraphs."
        raise NotStronglyConnectedError(msg)
    lap = laplacian(d)
    balanced = is_balanced(d)
    if balanced:
        lap_pinv = pinv_balanced(d)
        kap: Fraction | None = kappa(d)
    else:
        msg = (
            "The digraph is not balanced, so its Laplacian cofactors depend on the root. "
            "kappa will be omitted and the general pseudoinverse is used."
        )
        warnings.warn(msg, category=RuntimeWarning)
        lap_pinv = pinv_general(lap)
        kap = None
    return ResistanceResult(
        lap=lap,
        lap_pinv=lap_pinv,
        rmat=resistance_matrix(lap_pinv),
        kappa=kap,
        balanced_path_used=balanced,
    )


def pair_cofactor(d: Digraph, i: int, j: int) -> Fraction:
    """
    `det(L[{i, j}^c, {i, j}^c])` for distinct vertices `i` and `j`.
    """
    if i == j:
        msg = f"pair_cofactor needs two distinct vertices. Got {i} twice."
        raise InvalidDigraphError(msg)
    for v in (i, j):
        if not d.has_vertex(v):
            msg = f"{v} is not a vertex of a digraph on 1..{d.n}."
            raise InvalidDigraphError(msg)
    return det(delete(laplacian(d), {i, j}, {i, j}))


def inverse_cofactor(d: Digraph, pivot: int, i: int, j: int) -> Fraction:
    """
    Entry `c_ij` of `B^-1` (pivot removed) through the adjugate:
    `(-1)^(a+b) det(B[{b}^c, {a}^c]) / det(B)` with `a`, `b` the positions of `i`, `j`.
    """
    if pivot in (i, j):
        msg = "Neither vertex may be the pivot."
        raise InvalidDigraphError(msg)
    order = _permuted_order(d, pivot)
    positions = [v - 1 for v in order[:-1]]
    b = laplacian(d).take(positions, positions)
    a_pos, b_pos = order.index(i), order.index(j)
    minor = det(delete(b, {b_pos + 1}, {a_pos + 1}))
    return (-1) ** (a_pos + b_pos) * minor / det(b)


def glue_quantities(
    d1: Digraph, d2: Digraph, glue: int | tuple[int, int], i: int, j: int
) -> GlueQuantities:
    """
    Evaluate the gluing identities for the pair `(i, j)` of `D = D1 ∪ D2`.

    With the glue vertex `g` as pivot of `D`, `C = B^-1` is block diagonal and its
    `D1` block is the reduced inverse of `D1`. Then, for `n = |V(D1)|`, `k = |V(D2)| - 1`
    and `N = n + k`:

    - `r_ij^D  = c_term + (x_i - y_i + y_j - x_j) / N`
    - `r_ij^D1 = c_term + (x_i - y_i + y_j - x_j) / n`
    - `r_ij^D  = (n r_ij^D1 + k c_term) / N`
    - `r_ij^D + r_ji^D = 2 (c_ii + c_jj - c_ij - c_ji) = 2 det(L[{i,j}^c, {i,j}^c]) / kappa(D)`

    and in the endpoint case the diagonal entry of the non-glue vertex `v` equals
    `det(L[{v,g}^c, {v,g}^c]) / kappa(D)`. Every identity is checked exactly.

    Parameters
    ----------
    d1: Digraph
        The piece that contains `i` and `j`. Must be connected and balanced.
    d2: Digraph
        The piece glued on. Must be connected and balanced.
    glue: int | tuple[int, int]
        The glue vertex of `d1`, or a pair (vertex of `d1`, vertex of `d2`). A single
        int is used on both sides.
    i, j: int
        Distinct vertices of `d1`.

    Returns
    -------
    GlueQuantities
    """
    g1, g2 = glue if isinstance(glue, tuple) else (glue, glue)
    if i == j or not (d1.has_vertex(i) and d1.has_vertex(j)):
        msg = (
            f"Gluing identities need two distinct vertices of the first piece. "
            f"Got ({i}, {j}) for a piece on 1..{d1.n}; swap the pieces if the pair lies "
            "in the second one."
        )
        raise InvalidDigraphError(msg)
    for piece in (d1, d2):
        if not is_connected(piece):
            raise NotConnectedError("Both pieces must be connected; one is not connected.")
        if not is_balanced(piece):
            raise NotBalancedError("Both pieces must be balanced.")

    d = one_point_union(d1, d2, g1, g2)
    n, k, big_n = d1.n, d2.n - 1, d.n
    if big_n != n + k:
        msg = f"Vertex bookkeeping failed: N = {big_n} but n + k = {n + k}."
        raise IdentityViolationError(msg)

    part = partition_data(d, g1)
    part1 = partition_data(d1, g1)
    inner = list(range(n - 1))
    if part.Cmat.take(inner, inner) != part1.Cmat or part.x[: n - 1] != part1.x:
        msg = "The reduced inverse of the union is not block diagonal with the piece's inverse."
        raise IdentityViolationError(msg)

    c_ii, c_jj, c_ij, c_ji = part.c(i, i), part.c(j, j), part.c(i, j), part.c(j, i)
    c_term = c_ii + c_jj - 2 * c_ij
    skew = part.row_sum(i) - part.col_sum(i) + part.col_sum(j) - part.row_sum(j)
    res = resistance(d)
    res1 = resistance(d1)
    r_d, r_d1 = res.r(i, j), res1.r(i, j)
    glued = (n * r_d1 + k * c_term) / big_n
    symmetric_term = c_ii + c_jj - c_ij - c_ji
    assert res.kappa is not None
    cofactor_ratio = pair_cofactor(d, i, j) / res.kappa

    checks = {
        "pair formula over D": (r_d, c_term + skew / big_n),
        "pair formula over D1": (r_d1, c_term + skew / n),
        "gluing formula": (r_d, glued),
        "symmetric sum": (r_d + res.r(j, i), 2 * symmetric_term),
        "sum identity": (r_d + res.r(j, i), 2 * cofactor_ratio),
    }
    case: Literal["endpoint", "interior"] = "endpoint" if g1 in (i, j) else "interior"
    if case == "endpoint":
        v = j if i == g1 else i
        checks["diagonal cofactor"] = (part.c(v, v), pair_cofactor(d, v, g1) / res.kappa)
    for name, (lhs, rhs) in checks.items():
        if lhs != rhs:
            msg = (
                f"The {name} identity failed for ({i}, {j}) with glue vertex {g1}: "
                f"{lhs} != {rhs}."
            )
            raise IdentityViolationError(msg)

    return GlueQuantities(
        case=case,
        i=i,
        j=j,
        glue=g1,
        n=n,
        k=k,
        N=big_n,
        r_D=r_d,
        r_D1=r_d1,
        c_terms={"c_ii": c_ii, "c_jj": c_jj, "c_ij": c_ij, "c_ji": c_ji, "c_term": c_term},
        pair_formula_D=c_term + skew / big_n,
        pair_formula_D1=c_term + skew / n,
        glued=glued,
        symmetric_term=symmetric_term,
        cofactor_ratio=cofactor_ratio,
    )
