from __future__ import annotations

import networkx as nx
import pytest
from pydantic import ValidationError

from digraph_resistance.core import INF, InvalidDigraphError, NotBalancedError, NotConnectedError
from digraph_resistance.digraph import (
    Digraph,
    arcs_of,
    block_subgraph,
    blocks,
    class_c_certificate,
    degrees,
    is_balanced,
    is_connected,
    is_directed_cactus,
    is_directed_cycle,
    is_strongly_connected,
    one_point_union,
    shortest_distances,
    two_point_union,
    underlying_graph,
)
from digraph_resistance.generators import (
    FIG_D_ARCS,
    fixture,
    gen_balanced_random,
    gen_cactus,
    gen_class_c,
    gen_cycle,
)

BOWTIE = one_point_union(gen_cycle(2), gen_cycle(2), 2, 1)


@pytest.mark.parametrize(
    "arcs",
    [((1, 1),), ((1, 2), (1, 2)), ((1, 3),), ((0, 1),)],
    ids=["self-loop", "duplicate", "too-large", "zero"],
)
def test_digraph_rejects_invalid_arcs(arcs: tuple[tuple[int, int], ...]) -> None:
    with pytest.raises(ValidationError):
        Digraph(n=2, arcs=arcs)


def test_digraph_sorts_arcs() -> None:
    d = Digraph(n=3, arcs=((3, 1), (1, 2), (2, 3)))
    assert d.arcs == ((1, 2), (2, 3), (3, 1))
    assert d == fixture("C3")


@pytest.mark.parametrize(
    "digraph, indeg, outdeg",
    [
        ("DIGON", (1, 1), (1, 1)),
        ("FIG_D", (1, 2, 2, 1, 1, 2, 1, 1), (1, 2, 2, 1, 1, 2, 1, 1)),
        ("CEX", (3, 1, 1, 1), (2, 1, 1, 2)),
    ],
    indirect=["digraph"],
)
def test_degrees(digraph: Digraph, indeg: tuple[int, ...], outdeg: tuple[int, ...]) -> None:
    assert degrees(digraph) == (indeg, outdeg)
    assert sum(indeg) == len(digraph.arcs)


@pytest.mark.parametrize(
    "digraph, expected",
    [("FIG_D", True), ("CEX", False), ("DIGON", True), ("C3", True)],
    indirect=["digraph"],
)
def test_is_balanced(digraph: Digraph, expected: bool) -> None:
    assert is_balanced(digraph) is expected


@pytest.mark.parametrize(
    "d, expected",
    [
        (fixture("FIG_D"), True),
        (fixture("CEX"), True),
        (Digraph(n=2), False),
        (Digraph(n=2, arcs=((1, 2),)), False),
        (Digraph(n=1), True),
    ],
)
def test_is_strongly_connected(d: Digraph, expected: bool) -> None:
    assert is_strongly_connected(d) is expected


def test_shortest_distances() -> None:
    assert shortest_distances(fixture("FIG_D"))[0][2] == 1
    assert shortest_distances(fixture("CEX"))[2][0] == 1
    assert shortest_distances(fixture("C3"))[1][0] == 2
    path = shortest_distances(Digraph(n=2, arcs=((1, 2),)))
    assert path == ((0, 1), (INF, 0))


@pytest.mark.parametrize("seed", range(5))
def test_shortest_distances_triangle_inequality(seed: int) -> None:
    d = gen_balanced_random(7, 12, seed)
    dist = shortest_distances(d)
    for i in range(d.n):
        assert dist[i][i] == 0
        for j in range(d.n):
            for k in range(d.n):
                assert dist[i][j] <= dist[i][k] + dist[k][j]


def test_blocks_fig_d() -> None:
    decomposition = blocks(fixture("FIG_D"))
    assert decomposition.cut_vertices == (6,)
    assert decomposition.blocks == (FIG_D_ARCS[:8], ((6, 7), (7, 8), (8, 6)))
    assert decomposition.block_cut_tree == ((6,), (6,))
    assert decomposition.blocks_at(6) == (0, 1)


def test_blocks_cycle() -> None:
    decomposition = blocks(fixture("C3"))
    assert decomposition.cut_vertices == ()
    assert len(decomposition.blocks) == 1


def test_blocks_bowtie() -> None:
    assert BOWTIE.n == 3
    assert len(BOWTIE.arcs) == 4
    decomposition = blocks(BOWTIE)
    assert decomposition.cut_vertices == (2,)
    assert decomposition.blocks == (((1, 2), (2, 1)), ((2, 3), (3, 2)))


def test_blocks_disconnected() -> None:
    with pytest.raises(NotConnectedError, match="not connected"):
        blocks(Digraph(n=4, arcs=((1, 2), (2, 1), (3, 4), (4, 3))))


@pytest.mark.parametrize("seed", range(8))
def test_blocks_brute_force(seed: int) -> None:
    d = gen_class_c(3, "balanced_random", (2, 4), seed).digraph
    decomposition = blocks(d)
    graph = underlying_graph(d)
    for v in d.vertices:
        rest = graph.copy()
        rest.remove_node(v)
        assert (v in decomposition.cut_vertices) is (not nx.is_connected(rest))
    # blocks partition the arc set and overlap only at cut vertices
    all_arcs = [arc for block in decomposition.blocks for arc in block]
    assert sorted(all_arcs) == list(d.arcs)
    for a in range(len(decomposition.blocks)):
        piece, _ = block_subgraph(decomposition, a)
        assert is_balanced(piece)
        for b in range(a + 1, len(decomposition.blocks)):
            shared = set(decomposition.block_vertices(a)) & set(decomposition.block_vertices(b))
            assert len(shared) <= 1
            assert shared <= set(decomposition.cut_vertices)


def test_block_subgraph_relabels() -> None:
    decomposition = blocks(fixture("FIG_D"))
    piece, relabel = block_subgraph(decomposition, 1)
    assert piece == gen_cycle(3)
    assert relabel == {6: 1, 7: 2, 8: 3}


def test_one_point_union_reproduces_fig_d() -> None:
    assert one_point_union(fixture("FIG_D1"), fixture("FIG_D2_TRIANGLE"), 6, 1) == fixture("FIG_D")


def test_one_point_union_with_single_vertex() -> None:
    d1 = fixture("FIG_D1")
    assert one_point_union(d1, Digraph(n=1), 4, 1) == d1


def test_one_point_union_adds_degrees() -> None:
    d1, d2 = fixture("C3"), fixture("DIGON")
    union = one_point_union(d1, d2, 2, 1)
    indeg, outdeg = degrees(union)
    assert indeg[1] == degrees(d1)[0][1] + degrees(d2)[0][0]
    assert outdeg[1] == degrees(d1)[1][1] + degrees(d2)[1][0]
    assert is_balanced(union) and is_connected(union)


def test_one_point_union_bad_vertex() -> None:
    with pytest.raises(InvalidDigraphError):
        one_point_union(fixture("C3"), fixture("DIGON"), 4, 1)


def test_two_point_union() -> None:
    union = two_point_union(gen_cycle(3), gen_cycle(3), (1, 1), (2, 3))
    assert union == Digraph(n=4, arcs=((1, 2), (2, 3), (3, 1), (1, 4), (4, 2), (2, 1)))
    assert is_balanced(union) and is_strongly_connected(union)


def test_two_point_union_duplicate_arc() -> None:
    with pytest.raises(InvalidDigraphError, match="duplicate"):
        two_point_union(gen_cycle(2), gen_cycle(2), (1, 1), (2, 2))


@pytest.mark.parametrize(
    "d, expected",
    [
        (gen_cycle(3), True),
        (gen_cycle(2), True),
        (Digraph(n=1), False),
        (fixture("FIG_D"), False),
        (BOWTIE, False),
    ],
)
def test_is_directed_cycle(d: Digraph, expected: bool) -> None:
    assert is_directed_cycle(d) is expected


@pytest.mark.parametrize(
    "d, expected",
    [
        (fixture("C3"), True),
        (fixture("FIG_D"), False),
        (fixture("CEX"), False),
        (one_point_union(gen_cycle(3), gen_cycle(2), 3, 1), True),
        (BOWTIE, True),
        (Digraph(n=1), True),
    ],
)
def test_is_directed_cactus(d: Digraph, expected: bool) -> None:
    assert is_directed_cactus(d) is expected


def test_class_c_certificate_fig_d() -> None:
    cert = class_c_certificate(fixture("FIG_D"), lambda piece: True)
    assert cert.holds
    assert cert.order == (0, 1)
    assert cert.attachments == (None, 6)


def test_class_c_certificate_failure_names_block() -> None:
    cert = class_c_certificate(fixture("FIG_D"), is_directed_cycle)
    assert not cert.holds
    assert cert.failing_block == 0
    assert "block 0" in cert.failure


def test_class_c_certificate_unbalanced() -> None:
    with pytest.raises(NotBalancedError):
        class_c_certificate(fixture("CEX"), lambda piece: True)


@pytest.mark.parametrize("seed", range(5))
def test_class_c_certificate_cactus(seed: int) -> None:
    d = gen_cactus(4, (2, 5), seed)
    cert = class_c_certificate(d, is_directed_cycle)
    assert cert.holds
    assert len(cert.order) == 4
    assert cert.order[0] in blocks(d).blocks_at(1)


@pytest.mark.parametrize("seed", range(5))
def test_class_c_certificate_matches_construction(seed: int) -> None:
    union = gen_class_c(3, "balanced_random", (2, 6), seed)
    cert = class_c_certificate(union.digraph, lambda piece: True)
    assert cert.holds
    assert arcs_of(cert.blocks) == arcs_of(union.piece_blocks())


@pytest.mark.parametrize("seed", range(10))
def test_connected_balanced_is_strongly_connected(seed: int) -> None:
    d = gen_class_c(3, "balanced_random", (2, 5), seed).digraph
    assert is_connected(d) and is_balanced(d)
    assert is_strongly_connected(d)
