"""
Reading and writing digraphs, and rendering reports.

Two file formats are supported. The edge-list format is plain text with an optional
header line `n <N>`, one arc `u v` per line, `#` comments and blank lines. The JSON
format is an object `{"n": N, "arcs": [[u, v], ...]}`. Both parsers report the line
(or arc index) of the first problem.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List, Literal, Tuple

from pydantic import BaseModel, ConfigDict

from digraph_resistance.core import (
    DEFAULT_PRECISION,
    JSON,
    DigraphFormatError,
    format_decimal,
    format_distance,
    format_rat,
)
from digraph_resistance.digraph import Arc, ClassCCertificate, Digraph

if TYPE_CHECKING:
    from fractions import Fraction

    from digraph_resistance.digraph import BlockDecomposition
    from digraph_resistance.linalg import RatMatrix
    from digraph_resistance.spectral import ResistanceResult
    from digraph_resistance.verify import VerifyReport

GraphFormat = Literal["edges", "json"]


def _check_arc(u: int, v: int, n: int | None, seen: set[Arc], line: int) -> None:
    if u < 1 or v < 1:
        raise DigraphFormatError(line, f"vertex ids are 1-based; got arc ({u}, {v})")
    if u == v:
        raise DigraphFormatError(line, f"self-loop ({u}, {v}) is not allowed")
    if (u, v) in seen:
        raise DigraphFormatError(line, f"duplicate arc ({u}, {v})")
    if n is not None and (u > n or v > n):
        raise DigraphFormatError(line, f"arc ({u}, {v}) has a vertex outside 1..{n}")
    seen.add((u, v))


def parse_edges(text: str) -> Digraph:
    """
    Parse the edge-list format.

    Without a header the vertex count is the largest label that appears.
    """
    n: int | None = None
    arcs: list[Arc] = []
    seen: set[Arc] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "n":
            if n is not None or arcs:
                raise DigraphFormatError(lineno, "the header 'n <N>' must come before any arc")
            if len(tokens) != 2 or not tokens[1].isdigit() or int(tokens[1]) < 1:
                raise DigraphFormatError(lineno, f"expected 'n <N>' with N >= 1, got {line!r}")
            n = int(tokens[1])
            continue
        if len(tokens) != 2:
            raise DigraphFormatError(lineno, f"expected an arc 'u v', got {line!r}")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise DigraphFormatError(lineno, f"vertex ids must be integers, got {line!r}") from None
        _check_arc(u, v, n, seen, lineno)
        arcs.append((u, v))
    if n is None:
        if not arcs:
            raise DigraphFormatError(None, "the edge list has neither a header nor any arcs")
        n = max(max(arc) for arc in arcs)
    return Digraph(n=n, arcs=tuple(arcs))


def emit_edges(d: Digraph) -> str:
    lines = [f"n {d.n}"] + [f"{u} {v}" for u, v in d.arcs]
    return "\n".join(lines) + "\n"


def parse_json(text: str) -> Digraph:
    """
    Parse the JSON format. Errors about individual arcs carry the 1-based arc index
    in place of a line number.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DigraphFormatError(e.lineno, f"invalid JSON: {e.msg}") from e
    if not isinstance(doc, dict) or "n" not in doc or "arcs" not in doc:
        raise DigraphFormatError(None, 'expected an object with the keys "n" and "arcs"')
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DigraphFormatError(None, f'"n" must be a positive integer, got {n!r}')
    if not isinstance(doc["arcs"], list):
        raise DigraphFormatError(None, '"arcs" must be an array of [u, v] pairs')
    arcs: list[Arc] = []
    seen: set[Arc] = set()
    for index, item in enumerate(doc["arcs"], start=1):
        if (
            not isinstance(item, list)
            or len(item) != 2
            or any(isinstance(x, bool) or not isinstance(x, int) for x in item)
        ):
            raise DigraphFormatError(index, f"expected a pair of integers, got {item!r}")
        u, v = item
        _check_arc(u, v, n, seen, index)
        arcs.append((u, v))
    return Digraph(n=n, arcs=tuple(arcs))


def emit_json(d: Digraph) -> str:
    return json.dumps({"n": d.n, "arcs": [list(arc) for arc in d.arcs]}) + "\n"


def parse_digraph(text: str, fmt: GraphFormat) -> Digraph:
    if fmt == "edges":
        return parse_edges(text)
    if fmt == "json":
        return parse_json(text)
    msg = f"Unknown graph format {fmt!r}. Expected 'edges' or 'json'."
    raise ValueError(msg)


def emit_digraph(d: Digraph, fmt: GraphFormat) -> str:
    if fmt == "edges":
        return emit_edges(d)
    if fmt == "json":
        return emit_json(d)
    msg = f"Unknown graph format {fmt!r}. Expected 'edges' or 'json'."
    raise ValueError(msg)


def read_digraph(path: str | Path, fmt: GraphFormat) -> Digraph:
    data = Path(path).read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        line = data.count(b"\n", 0, e.start) + 1 if fmt == "edges" else None
        raise DigraphFormatError(line, f"{path} is not UTF-8 text: {e.reason}") from e
    return parse_digraph(text, fmt)


def write_digraph(d: Digraph, path: str | Path, fmt: GraphFormat) -> None:
    Path(path).write_text(emit_digraph(d, fmt))


class RenderedMatrix(BaseModel):
    """
    A rational matrix as "p/q" strings and as decimals.
    """

    model_config = ConfigDict(frozen=True)

    exact: List[List[str]]
    decimal: List[List[str]]


def render_matrix(m: RatMatrix, precision: int = DEFAULT_PRECISION) -> RenderedMatrix:
    return RenderedMatrix(
        exact=m.to_strings(),
        decimal=[[format_decimal(x, precision) for x in row] for row in m],
    )


def render_rat(value: Fraction, precision: int = DEFAULT_PRECISION) -> Dict[str, str]:
    return {"exact": format_rat(value), "decimal": format_decimal(value, precision)}


class ComputeReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    tool_version: str
    config: Dict[str, Any]
    n: int
    arcs: List[Arc]
    balanced: bool
    strongly_connected: bool
    kappa: Dict[str, str] | None
    laplacian: RenderedMatrix
    laplacian_pinv: RenderedMatrix
    resistance: RenderedMatrix
    distances: List[List[str | int]]


def compute_report(
    d: Digraph,
    result: ResistanceResult,
    distances: tuple[tuple[int | float, ...], ...],
    *,
    tool_version: str,
    config: dict[str, Any],
    precision: int = DEFAULT_PRECISION,
) -> ComputeReport:
    return ComputeReport(
        tool_version=tool_version,
        config=config,
        n=d.n,
        arcs=list(d.arcs),
        balanced=result.balanced_path_used,
        strongly_connected=True,
        kappa=None if result.kappa is None else render_rat(result.kappa, precision),
        laplacian=render_matrix(result.lap, precision),
        laplacian_pinv=render_matrix(result.lap_pinv, precision),
        resistance=render_matrix(result.rmat, precision),
        distances=[[format_distance(x) for x in row] for row in distances],
    )


def verify_payload(
    report: VerifyReport,
    *,
    tool_version: str,
    config: dict[str, Any],
    precision: int = DEFAULT_PRECISION,
    timings: bool = False,
) -> dict[str, JSON]:
    """
    The JSON document for a verification run. Violations and the worst arc carry
    decimal renderings next to the exact values; timings are left out unless asked for,
    so the document only depends on the input and the config.
    """
    body = report.model_dump(mode="json")
    for item, violation in zip(body["violations"], report.violations):
        item["r_decimal"] = format_decimal(violation.r, precision)
    if report.worst_arc_resistance is not None:
        body["worst_arc_resistance_decimal"] = format_decimal(report.worst_arc_resistance, precision)
    if not timings:
        body.pop("timings")
    return {"tool_version": tool_version, "config": config, **body}


class DecomposeReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    tool_version: str
    config: Dict[str, Any]
    n: int
    cut_vertices: List[int]
    blocks: List[List[Arc]]
    block_cut_tree: List[List[int]]
    is_directed_cactus: bool
    balanced: bool
    certificate: ClassCCertificate | None
    block_conjecture: List[bool | None]


def decompose_report(
    d: Digraph,
    decomposition: BlockDecomposition,
    *,
    cactus: bool,
    balanced: bool,
    certificate: ClassCCertificate | None,
    block_conjecture: list[bool | None],
    tool_version: str,
    config: dict[str, Any],
) -> DecomposeReport:
    return DecomposeReport(
        tool_version=tool_version,
        config=config,
        n=d.n,
        cut_vertices=list(decomposition.cut_vertices),
        blocks=[list(b) for b in decomposition.blocks],
        block_cut_tree=[list(t) for t in decomposition.block_cut_tree],
        is_directed_cactus=cactus,
        balanced=balanced,
        certificate=certificate,
        block_conjecture=block_conjecture,
    )


def resistance_table(
    d: Digraph,
    result: ResistanceResult,
    distances: tuple[tuple[int | float, ...], ...],
    precision: int = DEFAULT_PRECISION,
) -> str:
    """
    A fixed-width table of every ordered pair `(i, j)`, `i != j`, sorted ascending,
    with the exact and decimal resistance and the shortest path length.
    """
    rows: list[tuple[str, ...]] = [("i", "j", "r_exact", "r_decimal", "d", "r<=d")]
    for i in d.vertices:
        for j in d.vertices:
            if i == j:
                continue
            r = result.r(i, j)
            dist = distances[i - 1][j - 1]
            rows.append(
                (
                    str(i),
                    str(j),
                    format_rat(r),
                    format_decimal(r, precision),
                    str(format_distance(dist)),
                    "yes" if r <= dist else "NO",
                )
            )
    widths = [max(len(row[k]) for row in rows) for k in range(len(rows[0]))]
    return "".join(
        "  ".join(cell.rjust(w) for cell, w in zip(row, widths)).rstrip() + "\n" for row in rows
    )


def dump_json(doc: BaseModel | dict[str, JSON]) -> str:
    """
    Serialize a report with stable key order and a trailing newline.
    """
    if isinstance(doc, BaseModel):
        return doc.model_dump_json(indent=2) + "\n"
    return json.dumps(doc, indent=2) + "\n"


def fixture_listing(entries: Tuple[Tuple[str, int, int, str], ...]) -> str:
    """
    One line per fixture: name, vertex and arc counts, provenance.
    """
    width = max(len(name) for name, *_ in entries)
    return "".join(
        f"{name.ljust(width)}  n={n:<3} arcs={m:<3} {note}\n" for name, n, m, note in entries
    )
