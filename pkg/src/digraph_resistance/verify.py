"""
Exact checks of `r_ij <= d_ij` and of the identities and inequalities that
resistance distances satisfy on strongly connected balanced digraphs.
"""

from __future__ import annotations

import logging
import time
from fractions import Fraction
from typing import TYPE_CHECKING, Dict, Literal, Tuple, Union

from pydantic import BaseModel, ConfigDict, model_validator

from digraph_resistance.core import (
    NotBalancedError,
    NotStronglyConnectedError,
    Rational,
    format_rat,
)
from digraph_resistance.digraph import (
    Arc,
    ClassCCertificate,
    Digraph,
    class_c_certificate,
    degrees,
    is_balanced,
    is_strongly_connected,
    shortest_distances,
)
from digraph_resistance.linalg import penrose_check, pinv_general
from digraph_resistance.spectral import (
    ResistanceResult,
    pair_cofactor,
    partition_data,
    pinv_balanced,
    resistance,
)

if TYPE_CHECKING:
    from typing import Callable, Iterator

logger = logging.getLogger(__name__)

Witness = Dict[str, Union[int, str]]

SUITES: tuple[str, ...] = (
    "nonnegativity",
    "zero_diagonal_iff",
    "triangle_inequality",
    "sum_identity",
    "arc_det_bound",
    "indegree_one_arc_bound",
    "partitioned_pinv",
    "cofactor_ceiling",
)


class GraphSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    arc_count: int
    balanced: bool
    strongly_connected: bool


class Violation(BaseModel):
    """
    An ordered pair with `r_ij > d_ij`. Vertices are 1-based.
    """

    model_config = ConfigDict(frozen=True)

    i: int
    j: int
    r: Rational
    d: int


class IdentityResult(BaseModel):
    """
    The outcome of one identity suite.

    Attributes
    ----------
    name: str
        The suite name.
    status: "pass" | "fail" | "skip"
    checked: int
        How many instances (pairs, triples or arcs) were checked before the suite
        finished or failed.
    witness: dict | None
        The first failing instance: 1-based vertices and the exact values on both
        sides, rendered as "p/q".
    reason: str | None
        Why the suite was skipped or failed.
    """

    model_config = ConfigDict(frozen=True)

    name: str
    status: Literal["pass", "fail", "skip"]
    checked: int = 0
    witness: Witness | None = None
    reason: str | None = None


class VerifyReport(BaseModel):
    """
    Machine-readable verdict of a verification run.

    `conjecture_holds` is true exactly when `violations` is empty. Arc-bound fields are
    `None` for unbalanced inputs. `certificate` and `theorem_consistent` are only set
    by `verify_theorem_main`.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    graph_summary: GraphSummary
    conjecture_holds: bool
    violations: Tuple[Violation, ...] = ()
    arc_bound_holds: bool | None = None
    worst_arc: Arc | None = None
    worst_arc_resistance: Rational | None = None
    identity_results: Dict[str, IdentityResult] = {}
    timings: Dict[str, float] = {}
    certificate: ClassCCertificate | None = None
    theorem_consistent: bool | None = None

    @model_validator(mode="after")
    def _violations_match_verdict(self) -> VerifyReport:
        if self.conjecture_holds != (len(self.violations) == 0):
            msg = (
                f"conjecture_holds is {self.conjecture_holds} but there are "
                f"{len(self.violations)} violations."
            )
            raise ValueError(msg)
        for v in self.violations:
            if not v.r > v.d:
                msg = f"Violation ({v.i}, {v.j}) has r = {v.r} which does not exceed d = {v.d}."
                raise ValueError(msg)
        return self


class _Stopwatch:
    def __init__(self) -> None:
        self.timings: dict[str, float] = {}

    def phase(self, name: str, func: Callable[[], object]) -> object:
        start = time.perf_counter()
        out = func()
        self.timings[name] = round((time.perf_counter() - start) * 1000, 3)
        logger.debug("phase %s took %.3f ms", name, self.timings[name])
        return out


def summarize(d: Digraph) -> GraphSummary:
    return GraphSummary(
        n=d.n,
        arc_count=len(d.arcs),
        balanced=is_balanced(d),
        strongly_connected=is_strongly_connected(d),
    )


def _require_strongly_connected(d: Digraph) -> None:
    if not is_strongly_connected(d):
        msg = "Verification requires a strongly connected digraph; this one is not strongly connected."
        raise NotStronglyConnectedError(msg)


def check_arc_bound(
    d: Digraph, result: ResistanceResult | None = None
) -> tuple[bool, tuple[Arc, Fraction] | None]:
    """
    Whether every arc has resistance at most 1, together with the arc of largest
    resistance (ties broken by the smaller arc). The worst arc is `None` when there
    are no arcs.
    """
    _require_strongly_connected(d)
    if not is_balanced(d):
        msg = "The arc bound is only checked on balanced digraphs; this one is not balanced."
        raise NotBalancedError(msg)
    result = resistance(d) if result is None else result
    worst: tuple[Arc, Fraction] | None = None
    for arc in d.arcs:
        value = result.r(*arc)
        if worst is None or value > worst[1]:
            worst = (arc, value)
    holds = worst is None or worst[1] <= 1
    return holds, worst


def check_conjecture(d: Digraph, result: ResistanceResult | None = None) -> VerifyReport:
    """
    Compare every resistance distance with the shortest directed path length, exactly.

    Unbalanced inputs are allowed; their violations are reported like any other.

    Parameters
    ----------
    d: Digraph
        A strongly connected digraph.
    result: ResistanceResult | None, default is None
        A precomputed resistance result for `d`.

    Returns
    -------
    VerifyReport
        Violations are sorted by `(i, j)`.
    """
    _require_strongly_connected(d)
    watch = _Stopwatch()
    if result is None:
        result = watch.phase("resistance", lambda: resistance(d))  # type: ignore[assignment]
    assert result is not None
    dist = watch.phase("distances", lambda: shortest_distances(d))
    violations = []
    for i in d.vertices:
        for j in d.vertices:
            r_ij = result.r(i, j)
            d_ij = dist[i - 1][j - 1]  # type: ignore[index]
            if r_ij > d_ij:
                violations.append(Violation(i=i, j=j, r=r_ij, d=d_ij))
    arc_fields: dict[str, object] = {}
    if result.balanced_path_used:
        holds, worst = check_arc_bound(d, result)
        arc_fields["arc_bound_holds"] = holds
        if worst is not None:
            arc_fields["worst_arc"], arc_fields["worst_arc_resistance"] = worst
    if violations:
        logger.info("found %d pairs with r_ij > d_ij", len(violations))
    return VerifyReport(
        graph_summary=summarize(d),
        conjecture_holds=not violations,
        violations=tuple(violations),
        timings=watch.timings,
        **arc_fields,  # type: ignore[arg-type]
    )


def _witness(**values: int | Fraction) -> Witness:
    return {
        key: value if isinstance(value, int) else format_rat(value)
        for key, value in values.items()
    }


def _run_suite(name: str, cases: Iterator[tuple[bool, Witness]]) -> IdentityResult:
    checked = 0
    for ok, witness in cases:
        checked += 1
        if not ok:
            return IdentityResult(name=name, status="fail", checked=checked, witness=witness)
    return IdentityResult(name=name, status="pass", checked=checked)


def _nonnegativity(d: Digraph, res: ResistanceResult) -> Iterator[tuple[bool, Witness]]:
    for i in d.vertices:
        for j in d.vertices:
            r = res.r(i, j)
            yield r >= 0, _witness(i=i, j=j, r=r)


def _zero_diagonal_iff(d: Digraph, res: ResistanceResult) -> Iterator[tuple[bool, Witness]]:
    for i in d.vertices:
        for j in d.vertices:
            r = res.r(i, j)
            yield (r == 0) == (i == j), _witness(i=i, j=j, r=r)


def _triangle(d: Digraph, res: ResistanceResult) -> Iterator[tuple[bool, Witness]]:
    for i in d.vertices:
        for j in d.vertices:
            r_ij = res.r(i, j)
            for k in d.vertices:
                bound = res.r(i, k) + res.r(k, j)
                yield r_ij <= bound, _witness(i=i, j=j, k=k, r_ij=r_ij, r_ik_plus_r_kj=bound)


def _sum_identity(d: Digraph, res: ResistanceResult) -> Iterator[tuple[bool, Witness]]:
    assert res.kappa is not None
    for i in d.vertices:
        for j in range(i + 1, d.n + 1):
            lhs = res.r(i, j) + res.r(j, i)
            rhs = 2 * pair_cofactor(d, i, j) / res.kappa
            yield lhs == rhs, _witness(i=i, j=j, lhs=lhs, rhs=rhs)


def _arc_det_bound(d: Digraph, res: ResistanceResult) -> Iterator[tuple[bool, Witness]]:
    assert res.kappa is not None
    for i, j in d.arcs:
        cofactor = pair_cofactor(d, i, j)
        yield cofactor <= res.kappa, _witness(i=i, j=j, cofactor=cofactor, kappa=res.kappa)


def _indegree_one(d: Digraph, res: ResistanceResult) -> Iterator[tuple[bool, Witness]]:
    indeg, _ = degrees(d)
    for i, j in d.arcs:
        if indeg[i - 1] == 1 and indeg[j - 1] == 1:
            r = res.r(i, j)
            yield r <= 1, _witness(i=i, j=j, r=r)


def _partitioned_pinv(d: Digraph, res: ResistanceResult) -> Iterator[tuple[bool, Witness]]:
    general = pinv_general(res.lap)
    for pivot in d.vertices:
        fast = pinv_balanced(d, pivot)
        yield fast == general and penrose_check(res.lap, fast), _witness(pivot=pivot)


def _cofactor_ceiling(d: Digraph, res: ResistanceResult) -> Iterator[tuple[bool, Witness]]:
    part = partition_data(d)
    for i, j in d.arcs:
        term = part.c(i, i) + part.c(j, j) - part.c(i, j) - part.c(j, i)
        yield term <= 1, _witness(i=i, j=j, symmetric_term=term)


_SUITE_CASES: dict[str, Callable[[Digraph, ResistanceResult], Iterator[tuple[bool, Witness]]]] = {
    "nonnegativity": _nonnegativity,
    "zero_diagonal_iff": _zero_diagonal_iff,
    "triangle_inequality": _triangle,
    "sum_identity": _sum_identity,
    "arc_det_bound": _arc_det_bound,
    "indegree_one_arc_bound": _indegree_one,
    "partitioned_pinv": _partitioned_pinv,
    "cofactor_ceiling": _cofactor_ceiling,
}


def check_identities(
    d: Digraph, result: ResistanceResult | None = None
) -> dict[str, IdentityResult]:
    """
    Run every identity suite over one resistance result.

    The suites are: nonnegativity and zero-diagonal-iff of `R`, the triangle inequality
    over all triples, the sum identity `r_ij + r_ji = 2 det(L[{i,j}^c, {i,j}^c]) / kappa`
    over all pairs, the cofactor bound `det(L[{i,j}^c, {i,j}^c]) <= kappa` over all
    arcs, `r_ij <= 1` over arcs whose endpoints both have indegree one, agreement of the
    partitioned and general pseudoinverses for every pivot, and the bound
    `c_ii + c_jj - c_ij - c_ji <= 1` over all arcs.

    Every suite requires a balanced digraph. On unbalanced input each suite is
    skipped with the reason "not balanced".

    Returns
    -------
    dict[str, IdentityResult]
        Keyed by suite name, in a fixed order.
    """
    _require_strongly_connected(d)
    if not is_balanced(d):
        return {
            name: IdentityResult(name=name, status="skip", reason="not balanced") for name in SUITES
        }
    res = resistance(d) if result is None else result
    out = {name: _run_suite(name, _SUITE_CASES[name](d, res)) for name in SUITES}
    failed = [name for name, item in out.items() if item.status == "fail"]
    if failed:
        logger.error("identity suites failed: %s", ", ".join(failed))
    return out


def verify_theorem_main(d: Digraph) -> VerifyReport:
    """
    Check the conjecture block by block and on the whole digraph.

    A class C certificate is computed with the per-block conjecture check as the base
    predicate, then the conjecture is checked on `d` itself. Whenever every block
    passes, the whole digraph must pass too; if it does not, the inconsistency is
    logged as critical and `theorem_consistent` is false.

    Parameters
    ----------
    d: Digraph
        A connected, balanced digraph.

    Returns
    -------
    VerifyReport
    """
    watch = _Stopwatch()
    certificate = watch.phase(
        "certificate",
        lambda: class_c_certificate(d, lambda piece: check_conjecture(piece).conjecture_holds),
    )
    assert isinstance(certificate, ClassCCertificate)
    report = check_conjecture(d)
    consistent = not (certificate.holds and not report.conjecture_holds)
    if not consistent:
        logger.critical(
            "every block satisfies r_ij <= d_ij but the union has %d violations",
            len(report.violations),
        )
    return report.model_copy(
        update={
            "certificate": certificate,
            "theorem_consistent": consistent,
            "timings": {**watch.timings, **report.timings},
        }
    )
