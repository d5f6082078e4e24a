from __future__ import annotations

import logging
from collections import deque
from typing import TYPE_CHECKING, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict, PositiveInt, field_validator, model_validator

from digraph_resistance.core import (
    INF,
    Distance,
    IdentityViolationError,
    InvalidDigraphError,
    NotBalancedError,
    NotConnectedError,
)

if TYPE_CHECKING:
    from typing import Callable, Iterable

logger = logging.getLogger(__name__)

Arc = Tuple[int, int]


class Digraph(BaseModel):
    """
    A simple directed graph on the vertices 1..n.

    Arcs are stored as a sorted tuple, so two digraphs with the same arc set compare
    (and serialize) identically.

    Attributes
    ----------
    n: int
        The number of vertices.
    arcs: tuple[tuple[int, int], ...]
        The arc set. Self-loops and duplicate arcs are rejected.
    """

    model_config = ConfigDict(frozen=True)

    n: PositiveInt
    arcs: Tuple[Arc, ...] = ()

    @field_validator("arcs")
    @classmethod
    def _simple_arcs(cls, arcs: tuple[Arc, ...]) -> tuple[Arc, ...]:
        seen: set[Arc] = set()
        for u, v in arcs:
            if u == v:
                msg = f"Self-loop ({u}, {v}) is not allowed in a simple digraph."
                raise ValueError(msg)
            if (u, v) in seen:
                msg = f"Duplicate arc ({u}, {v})."
                raise ValueError(msg)
            seen.add((u, v))
        return tuple(sorted(arcs))

    @model_validator(mode="after")
    def _labels_in_range(self) -> Digraph:
        for u, v in self.arcs:
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                msg = f"Arc ({u}, {v}) has a vertex outside 1..{self.n}."
                raise ValueError(msg)
        return self

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def has_vertex(self, v: int) -> bool:
        return 1 <= v <= self.n

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(self.arcs)
        return graph


class BlockDecomposition(BaseModel):
    """
    Blocks and cut vertices of the underlying undirected graph of a digraph.

    Blocks are ordered by their smallest vertex, then by their sorted arc list.
    `block_cut_tree[b]` lists the cut vertices that lie in block `b`; together with
    the reverse incidence it is the bipartite block-cut tree.
    """

    model_config = ConfigDict(frozen=True)

    n: PositiveInt
    cut_vertices: Tuple[int, ...]
    blocks: Tuple[Tuple[Arc, ...], ...]
    block_cut_tree: Tuple[Tuple[int, ...], ...]

    def block_vertices(self, index: int) -> tuple[int, ...]:
        return tuple(sorted({v for arc in self.blocks[index] for v in arc}))

    def blocks_at(self, vertex: int) -> tuple[int, ...]:
        """
        Indices of the blocks that contain `vertex`.
        """
        return tuple(idx for idx, block in enumerate(self.blocks) if any(vertex in arc for arc in block))


class ClassCCertificate(BaseModel):
    """
    The outcome of an attempt to exhibit a digraph as an iterated one-point union.

    When `holds` is true, `order` lists block indices such that each block meets the
    union of its predecessors exactly in `attachments[k]`, and every block passed the
    base predicate.
    """

    model_config = ConfigDict(frozen=True)

    holds: bool
    order: Tuple[int, ...]
    attachments: Tuple[int | None, ...]
    blocks: Tuple[Tuple[Arc, ...], ...]
    failure: str | None = None
    failing_block: int | None = None


def _require_vertex(d: Digraph, v: int, role: str) -> None:
    if not d.has_vertex(v):
        msg = f"{role} {v} is not a vertex of a digraph on 1..{d.n}."
        raise InvalidDigraphError(msg)


def degrees(d: Digraph) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """
    Indegrees and outdegrees, indexed by vertex - 1.
    """
    indeg = [0] * d.n
    outdeg = [0] * d.n
    for u, v in d.arcs:
        outdeg[u - 1] += 1
        indeg[v - 1] += 1
    return tuple(indeg), tuple(outdeg)


def is_balanced(d: Digraph) -> bool:
    indeg, outdeg = degrees(d)
    return indeg == outdeg


def underlying_graph(d: Digraph) -> nx.Graph:
    """
    The underlying undirected simple graph. A digon contributes a single edge, which
    is enough to recover the blocks of the underlying multigraph.
    """
    graph = nx.Graph()
    graph.add_nodes_from(d.vertices)
    graph.add_edges_from(d.arcs)
    return graph


def is_connected(d: Digraph) -> bool:
    return nx.is_connected(underlying_graph(d))


def is_strongly_connected(d: Digraph) -> bool:
    return nx.is_strongly_connected(d.to_networkx())


def shortest_distances(d: Digraph) -> tuple[tuple[Distance, ...], ...]:
    """
    All-pairs shortest directed path lengths by breadth-first search from every
    source. Unreachable pairs are `INF`.
    """
    dist: list[list[Distance]] = [[INF] * d.n for _ in range(d.n)]
    for source, lengths in nx.all_pairs_shortest_path_length(d.to_networkx()):
        for target, length in lengths.items():
            dist[source - 1][target - 1] = length
    return tuple(tuple(row) for row in dist)


def blocks(d: Digraph) -> BlockDecomposition:
    """
    Decompose a connected digraph into the blocks of its underlying undirected graph.

    Parameters
    ----------
    d: Digraph
        A digraph whose underlying undirected graph is connected.

    Returns
    -------
    BlockDecomposition
    """
    graph = underlying_graph(d)
    if not nx.is_connected(graph):
        msg = "The underlying undirected graph is not connected."
        raise NotConnectedError(msg)
    arc_set = set(d.arcs)
    found: list[tuple[Arc, ...]] = []
    for edges in nx.biconnected_component_edges(graph):
        block_arcs: set[Arc] = set()
        for u, v in edges:
            block_arcs.update(arc for arc in ((u, v), (v, u)) if arc in arc_set)
        found.append(tuple(sorted(block_arcs)))
    found.sort(key=lambda arcs: (min(v for arc in arcs for v in arc), arcs))
    cut_vertices = tuple(sorted(nx.articulation_points(graph)))
    tree = tuple(
        tuple(c for c in cut_vertices if any(c in arc for arc in block)) for block in found
    )
    return BlockDecomposition(
        n=d.n, cut_vertices=cut_vertices, blocks=tuple(found), block_cut_tree=tree
    )


def block_subgraph(decomposition: BlockDecomposition, index: int) -> tuple[Digraph, dict[int, int]]:
    """
    Realize one block as a standalone digraph on 1..m.

    Returns the digraph and the map from original vertex ids to the new ids.
    """
    verts = decomposition.block_vertices(index)
    relabel = {v: k for k, v in enumerate(verts, start=1)}
    arcs = tuple((relabel[u], relabel[v]) for u, v in decomposition.blocks[index])
    return Digraph(n=len(verts), arcs=arcs), relabel


def glue_map(n1: int, n2: int, v2: int, v1: int) -> dict[int, int]:
    """
    Where each vertex of the second digraph lands in a one-point union: `v2` is
    identified with `v1`, and the other vertices of the second digraph become
    n1 + 1, n1 + 2, ... in increasing order.
    """
    mapping = {v2: v1}
    fresh = n1
    for v in range(1, n2 + 1):
        if v != v2:
            fresh += 1
            mapping[v] = fresh
    return mapping


def one_point_union(d1: Digraph, d2: Digraph, v1: int, v2: int) -> Digraph:
    """
    Glue `d2` onto `d1` by identifying vertex `v2` of `d2` with vertex `v1` of `d1`.

    The result has n1 + n2 - 1 vertices; vertices of `d1` keep their labels.
    """
    _require_vertex(d1, v1, "Glue vertex")
    _require_vertex(d2, v2, "Glue vertex")
    mapping = glue_map(d1.n, d2.n, v2, v1)
    arcs = d1.arcs + tuple((mapping[u], mapping[v]) for u, v in d2.arcs)
    return Digraph(n=d1.n + d2.n - 1, arcs=arcs)


def two_point_union(
    d1: Digraph, d2: Digraph, first: tuple[int, int], second: tuple[int, int]
) -> Digraph:
    """
    Glue `d2` onto `d1` along two vertices: `first = (a1, a2)` identifies vertex `a2`
    of `d2` with vertex `a1` of `d1`, and likewise for `second`.

    Raises `InvalidDigraphError` if the identification would create a duplicate arc.
    """
    (a1, a2), (b1, b2) = first, second
    for v, g in ((a1, d1), (b1, d1)):
        _require_vertex(g, v, "Glue vertex")
    for v, g in ((a2, d2), (b2, d2)):
        _require_vertex(g, v, "Glue vertex")
    if a1 == b1 or a2 == b2:
        msg = "The two identified vertex pairs must be distinct on both sides."
        raise InvalidDigraphError(msg)
    mapping = {a2: a1, b2: b1}
    fresh = d1.n
    for v in range(1, d2.n + 1):
        if v not in mapping:
            fresh += 1
            mapping[v] = fresh
    arcs = list(d1.arcs)
    existing = set(arcs)
    for u, v in d2.arcs:
        arc = (mapping[u], mapping[v])
        if arc in existing:
            msg = f"Identifying vertices creates the duplicate arc {arc}."
            raise InvalidDigraphError(msg)
        existing.add(arc)
        arcs.append(arc)
    return Digraph(n=fresh, arcs=tuple(arcs))


def is_directed_cycle(d: Digraph) -> bool:
    """
    Whether `d` is one directed cycle through all of its (at least two) vertices.
    """
    if d.n < 2 or len(d.arcs) != d.n:
        return False
    indeg, outdeg = degrees(d)
    return all(x == 1 for x in indeg + outdeg) and is_strongly_connected(d)


def is_directed_cactus(d: Digraph) -> bool:
    """
    Whether `d` is strongly connected, balanced, and every block is a single
    directed cycle.
    """
    if not (is_strongly_connected(d) and is_balanced(d)):
        return False
    decomposition = blocks(d)
    return all(
        is_directed_cycle(block_subgraph(decomposition, idx)[0])
        for idx in range(len(decomposition.blocks))
    )


def class_c_certificate(d: Digraph, base_ok: Callable[[Digraph], bool]) -> ClassCCertificate:
    """
    Order the blocks of a connected balanced digraph so that each block meets the
    union of the blocks before it in exactly one vertex, and check every block with
    `base_ok`.

    The order is a breadth-first traversal of the block-cut tree starting at the block
    that contains vertex 1. Each block is passed to `base_ok` as a standalone digraph
    relabelled to 1..m.

    Parameters
    ----------
    d: Digraph
        A connected, balanced digraph.
    base_ok: Callable[[Digraph], bool]
        The predicate every piece of the union must satisfy.

    Returns
    -------
    ClassCCertificate
        On failure, `failure` names the first block (in traversal order) rejected by
        `base_ok`.
    """
    if not is_balanced(d):
        msg = "A class C certificate requires a balanced digraph; this digraph is not balanced."
        raise NotBalancedError(msg)
    decomposition = blocks(d)
    if not decomposition.blocks:
        return ClassCCertificate(holds=True, order=(), attachments=(), blocks=())

    order, attachments = _block_cut_traversal(decomposition)
    covered: set[int] = set()
    for position, (idx, attach) in enumerate(zip(order, attachments)):
        verts = set(decomposition.block_vertices(idx))
        if position > 0 and verts & covered != {attach}:
            msg = (
                f"Block {idx} meets the preceding blocks in {sorted(verts & covered)}, "
                f"not in the single vertex {attach}."
            )
            raise IdentityViolationError(msg)
        covered |= verts
        piece, _ = block_subgraph(decomposition, idx)
        if not (is_balanced(piece) and is_connected(piece)):
            msg = f"Block {idx} of a connected balanced digraph is not connected and balanced."
            raise IdentityViolationError(msg)
        if not base_ok(piece):
            logger.debug("block %d rejected by the base predicate", idx)
            return ClassCCertificate(
                holds=False,
                order=tuple(order[:position]),
                attachments=tuple(attachments[:position]),
                blocks=tuple(decomposition.blocks[i] for i in order[:position]),
                failure=f"block {idx} (vertices {sorted(verts)}) fails the base predicate",
                failing_block=idx,
            )
    return ClassCCertificate(
        holds=True,
        order=tuple(order),
        attachments=tuple(attachments),
        blocks=tuple(decomposition.blocks[i] for i in order),
    )


def _block_cut_traversal(
    decomposition: BlockDecomposition,
) -> tuple[list[int], list[int | None]]:
    start = decomposition.blocks_at(1)[0]
    order: list[int] = [start]
    attachments: list[int | None] = [None]
    seen = {start}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for cut in decomposition.block_cut_tree[current]:
            for other in decomposition.blocks_at(cut):
                if other not in seen:
                    seen.add(other)
                    order.append(other)
                    attachments.append(cut)
                    queue.append(other)
    return order, attachments


def arcs_of(pieces: Iterable[Iterable[Arc]]) -> frozenset[frozenset[Arc]]:
    """
    Arc sets of a collection of pieces, for order-free comparison of decompositions.
    """
    return frozenset(frozenset(piece) for piece in pieces)
