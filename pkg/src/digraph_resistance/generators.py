"""
Built-in fixture digraphs and seeded generators of balanced digraphs.

All randomness comes from `SplitMix64`, so a generator spec and a seed determine the
output exactly on every platform.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import TYPE_CHECKING, Annotated, Any, Dict, Literal, Tuple, TypedDict, cast

from pydantic import BaseModel, ConfigDict, Field, Strict, TypeAdapter, ValidationError

from digraph_resistance.core import GeneratorError, InvalidDigraphError
from digraph_resistance.digraph import (
    Arc,
    Digraph,
    blocks as decompose,
    glue_map,
    is_connected,
    one_point_union,
    two_point_union,
)

if TYPE_CHECKING:
    from typing import MutableSequence, Sequence, TypeVar

    T = TypeVar("T")

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 1000
_MASK = (1 << 64) - 1
_SEED: TypeAdapter[int] = TypeAdapter(Annotated[int, Strict(), Field(ge=0, le=_MASK)])


@dataclass
class SplitMix64:
    """
    The SplitMix64 generator.

    Each step adds 0x9E3779B97F4A7C15 to the state and mixes it:

        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
        out = z ^ (z >> 31)

    with all arithmetic modulo 2^64. Bounded draws use rejection sampling and shuffles
    are Fisher-Yates from the last index down.
    """

    state: int

    def __post_init__(self) -> None:
        if not 0 <= self.state <= _MASK:
            msg = f"Seeds must be unsigned 64-bit integers. Got {self.state}."
            raise GeneratorError(msg)

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """
        A uniform integer in `[0, bound)`.
        """
        if bound < 1:
            msg = f"bound must be positive. Got {bound}."
            raise GeneratorError(msg)
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            value = self.next_u64()
            if value < limit:
                return value % bound

    def randint(self, low: int, high: int) -> int:
        """
        A uniform integer in `[low, high]`.
        """
        return low + self.below(high - low + 1)

    def shuffle(self, items: MutableSequence[Any]) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, population: Sequence[T], k: int) -> list[T]:
        pool = list(population)
        self.shuffle(pool)
        return pool[:k]


class GeneratedUnion(BaseModel):
    """
    A one-point union together with the pieces it was built from.

    `pieces[k]` is the arc set of the k-th piece in the labels of `digraph`, and
    `glue_vertices[k]` is the vertex where it met the union of the pieces before it
    (`None` for the first piece).
    """

    model_config = ConfigDict(frozen=True)

    digraph: Digraph
    pieces: Tuple[Tuple[Arc, ...], ...]
    glue_vertices: Tuple[int | None, ...]

    def piece_blocks(self) -> tuple[tuple[Arc, ...], ...]:
        """
        The blocks of every piece, in the labels of the union. These are exactly the
        blocks of the union.
        """
        out: list[tuple[Arc, ...]] = []
        for arcs in self.pieces:
            verts = sorted({v for arc in arcs for v in arc})
            relabel = {v: k for k, v in enumerate(verts, start=1)}
            piece = Digraph(n=len(verts), arcs=tuple((relabel[u], relabel[v]) for u, v in arcs))
            out.extend(
                tuple(sorted((verts[u - 1], verts[v - 1]) for u, v in block))
                for block in decompose(piece).blocks
            )
        return tuple(out)


def _check_range(low: int, high: int, minimum: int, what: str) -> None:
    if low < minimum or low > high:
        msg = f"Invalid {what} range [{low}, {high}]; need {minimum} <= low <= high."
        raise GeneratorError(msg)


def gen_cycle(n: int) -> Digraph:
    """
    The directed cycle 1 -> 2 -> ... -> n -> 1.
    """
    if n < 2:
        msg = f"A directed cycle needs at least 2 vertices. Got {n}."
        raise GeneratorError(msg)
    return Digraph(n=n, arcs=tuple((v, v % n + 1) for v in range(1, n + 1)))


def gen_balanced_random(n: int, target_arcs: int, seed: int) -> Digraph:
    """
    A connected balanced digraph built by superposing random directed cycles.

    Each attempt draws cycles of random length on random vertex subsets, rejecting
    any cycle that repeats an arc, until exactly `target_arcs` arcs are placed. The
    attempt is kept if the result is connected; otherwise a fresh attempt starts. An
    arc-disjoint union of directed cycles is balanced, and a connected balanced
    digraph is strongly connected.

    Parameters
    ----------
    n: int
        Number of vertices, at least 2.
    target_arcs: int
        Number of arcs, between n and n (n - 1).
    seed: int
        Unsigned 64-bit seed.

    Returns
    -------
    Digraph
    """
    if n < 2:
        msg = f"A balanced random digraph needs at least 2 vertices. Got {n}."
        raise GeneratorError(msg)
    if not n <= target_arcs <= n * (n - 1):
        msg = (
            f"A connected simple balanced digraph on {n} vertices has between {n} and "
            f"{n * (n - 1)} arcs. Got target_arcs={target_arcs}."
        )
        raise GeneratorError(msg)
    rng = SplitMix64(seed)
    population = range(1, n + 1)
    for attempt in range(1, MAX_ATTEMPTS + 1):
        arcs: set[Arc] = set()
        for _ in range(4 * target_arcs):
            remaining = target_arcs - len(arcs)
            if remaining < 2:
                break
            cycle = rng.sample(population, rng.randint(2, min(n, remaining)))
            new = [(u, cycle[(k + 1) % len(cycle)]) for k, u in enumerate(cycle)]
            if not arcs.intersection(new):
                arcs.update(new)
        if len(arcs) == target_arcs:
            d = Digraph(n=n, arcs=tuple(arcs))
            if is_connected(d):
                logger.debug("balanced random digraph accepted after %d attempts", attempt)
                return d
    msg = (
        f"Could not generate a connected balanced digraph with n={n} and "
        f"{target_arcs} arcs after {MAX_ATTEMPTS} attempts."
    )
    raise GeneratorError(msg)


def _piece_arc_count(rng: SplitMix64, n: int) -> int:
    target = rng.randint(n, min(n * (n - 1), 2 * n))
    # no balanced simple digraph on 3 vertices has 5 arcs
    return 4 if (n, target) == (3, 5) else target


def _union_of_pieces(pieces: Sequence[Digraph], rng: SplitMix64) -> GeneratedUnion:
    """
    Glue each piece onto the union of the previous ones at a uniformly chosen vertex
    of the union and a uniformly chosen vertex of the piece.
    """
    union = pieces[0]
    arc_sets: list[tuple[Arc, ...]] = [union.arcs]
    glue_vertices: list[int | None] = [None]
    for piece in pieces[1:]:
        v1 = rng.randint(1, union.n)
        v2 = rng.randint(1, piece.n)
        mapping = glue_map(union.n, piece.n, v2, v1)
        union = one_point_union(union, piece, v1, v2)
        arc_sets.append(tuple(sorted((mapping[u], mapping[v]) for u, v in piece.arcs)))
        glue_vertices.append(v1)
    return GeneratedUnion(digraph=union, pieces=tuple(arc_sets), glue_vertices=tuple(glue_vertices))


def gen_cactus(blocks: int, cycle_len_range: tuple[int, int], seed: int) -> Digraph:
    """
    A directed cactus: `blocks` directed cycles with lengths drawn from
    `cycle_len_range`, glued one at a time at existing vertices.
    """
    if blocks < 1:
        msg = f"A cactus needs at least one block. Got {blocks}."
        raise GeneratorError(msg)
    low, high = cycle_len_range
    _check_range(low, high, 2, "cycle length")
    rng = SplitMix64(seed)
    cycles = [gen_cycle(rng.randint(low, high)) for _ in range(blocks)]
    return _union_of_pieces(cycles, rng).digraph


def gen_class_c(
    blocks: int,
    block_kind: Literal["cycle", "balanced_random"],
    size_range: tuple[int, int],
    seed: int,
) -> GeneratedUnion:
    """
    An iterated one-point union of connected balanced pieces.

    Parameters
    ----------
    blocks: int
        Number of pieces, at least 1.
    block_kind: "cycle" | "balanced_random"
        How each piece is drawn. Balanced random pieces get between n and 2n arcs.
    size_range: tuple[int, int]
        Range of the vertex count of each piece.
    seed: int
        Unsigned 64-bit seed.

    Returns
    -------
    GeneratedUnion
        The union and its pieces, which serve as a ground truth decomposition.
    """
    if blocks < 1:
        msg = f"A union needs at least one piece. Got {blocks}."
        raise GeneratorError(msg)
    low, high = size_range
    _check_range(low, high, 2, "piece size")
    rng = SplitMix64(seed)
    pieces: list[Digraph] = []
    for _ in range(blocks):
        n = rng.randint(low, high)
        if block_kind == "cycle":
            pieces.append(gen_cycle(n))
        elif block_kind == "balanced_random":
            target = _piece_arc_count(rng, n)
            pieces.append(gen_balanced_random(n, target, rng.next_u64()))
        else:
            msg = f"Unknown block kind {block_kind!r}. Expected 'cycle' or 'balanced_random'."
            raise GeneratorError(msg)
    return _union_of_pieces(pieces, rng)


def gen_ring_union(pieces: int, cycle_len_range: tuple[int, int], seed: int) -> Digraph:
    """
    Directed cycles arranged in a ring: cycle k shares one vertex with cycle k + 1,
    and the last cycle shares one vertex with the first.

    The result is balanced and strongly connected but its pieces do not form a
    one-point union, since the ring closes a cycle of blocks.
    """
    if pieces < 3:
        msg = f"A ring of cycles needs at least 3 cycles. Got {pieces}."
        raise GeneratorError(msg)
    low, high = cycle_len_range
    _check_range(low, high, 2, "cycle length")
    rng = SplitMix64(seed)
    # shared vertex between cycle k and cycle k + 1 (mod pieces) is k + 1
    fresh = pieces
    arcs: list[Arc] = []
    for k in range(pieces):
        length = rng.randint(low, high)
        exit_pos = rng.randint(1, length - 1)
        labels = []
        for pos in range(length):
            if pos == 0:
                labels.append((k - 1) % pieces + 1)
            elif pos == exit_pos:
                labels.append(k + 1)
            else:
                fresh += 1
                labels.append(fresh)
        arcs.extend((labels[p], labels[(p + 1) % length]) for p in range(length))
    return Digraph(n=fresh, arcs=tuple(arcs))


def gen_two_point_union(
    size_range: tuple[int, int],
    seed: int,
    piece_kind: Literal["cycle", "balanced_random"] = "cycle",
) -> Digraph:
    """
    Two balanced pieces glued along two vertex pairs.

    Raises `GeneratorError` when the identification would repeat an arc; callers
    sampling many unions count these as discarded.
    """
    low, high = size_range
    _check_range(low, high, 2, "piece size")
    rng = SplitMix64(seed)
    pieces = []
    for _ in range(2):
        n = rng.randint(low, high)
        if piece_kind == "cycle":
            pieces.append(gen_cycle(n))
        else:
            target = _piece_arc_count(rng, n)
            pieces.append(gen_balanced_random(n, target, rng.next_u64()))
    d1, d2 = pieces
    a1, b1 = rng.sample(d1.vertices, 2)
    a2, b2 = rng.sample(d2.vertices, 2)
    try:
        return two_point_union(d1, d2, (a1, a2), (b1, b2))
    except InvalidDigraphError as e:
        msg = f"Two-point union with seed {seed} discarded: {e}"
        raise GeneratorError(msg) from e


GeneratorKind = Literal[
    "cycle",
    "digon",
    "cactus",
    "balanced_random",
    "class_c_union",
    "ring_union",
    "two_point_union",
]


class GenSpec(TypedDict):
    kind: GeneratorKind
    config: Dict[str, Any]
    seed: int


class BaseGenerator(ABC):
    # config values are checked strictly: "5" is not an int, unknown keys are errors
    __pydantic_config__ = ConfigDict(strict=True, extra="forbid")

    @abstractmethod
    def generate(self, seed: int) -> Digraph: ...


@dataclass
class CycleGenerator(BaseGenerator):
    n: int = 3

    def generate(self, seed: int) -> Digraph:
        return gen_cycle(self.n)


@dataclass
class DigonGenerator(BaseGenerator):
    def generate(self, seed: int) -> Digraph:
        return gen_cycle(2)


@dataclass
class BalancedRandomGenerator(BaseGenerator):
    """
    Attributes
    ----------
    n: int = 8
        Number of vertices.
    arcs: int = 14
        Number of arcs.
    """

    n: int = 8
    arcs: int = 14

    def generate(self, seed: int) -> Digraph:
        return gen_balanced_random(self.n, self.arcs, seed)


@dataclass
class CactusGenerator(BaseGenerator):
    blocks: int = 3
    cycle_min: int = 2
    cycle_max: int = 5

    def generate(self, seed: int) -> Digraph:
        return gen_cactus(self.blocks, (self.cycle_min, self.cycle_max), seed)


@dataclass
class ClassCGenerator(BaseGenerator):
    blocks: int = 3
    block_kind: Literal["cycle", "balanced_random"] = "balanced_random"
    size_min: int = 2
    size_max: int = 6

    def generate(self, seed: int) -> Digraph:
        return self.generate_union(seed).digraph

    def generate_union(self, seed: int) -> GeneratedUnion:
        return gen_class_c(self.blocks, self.block_kind, (self.size_min, self.size_max), seed)


@dataclass
class RingGenerator(BaseGenerator):
    pieces: int = 3
    cycle_min: int = 2
    cycle_max: int = 5

    def generate(self, seed: int) -> Digraph:
        return gen_ring_union(self.pieces, (self.cycle_min, self.cycle_max), seed)


@dataclass
class TwoPointUnionGenerator(BaseGenerator):
    size_min: int = 2
    size_max: int = 5
    piece_kind: Literal["cycle", "balanced_random"] = "cycle"

    def generate(self, seed: int) -> Digraph:
        return gen_two_point_union((self.size_min, self.size_max), seed, self.piece_kind)


_GENERATORS: dict[str, type[BaseGenerator]] = {
    "cycle": CycleGenerator,
    "digon": DigonGenerator,
    "cactus": CactusGenerator,
    "balanced_random": BalancedRandomGenerator,
    "class_c_union": ClassCGenerator,
    "ring_union": RingGenerator,
    "two_point_union": TwoPointUnionGenerator,
}


def resolve_generator(spec: GenSpec) -> BaseGenerator:
    """
    Convert a `GenSpec` into the corresponding `BaseGenerator` subclass.
    """
    kind = spec.get("kind")
    if kind not in _GENERATORS:
        msg = f"Generator kind {kind!r} is not recognized. Expected one of {sorted(_GENERATORS)}."
        raise GeneratorError(msg)
    config = spec.get("config", {})
    if not isinstance(config, dict):
        msg = f"The config for generator kind {kind!r} must be an object. Got {config!r}."
        raise GeneratorError(msg)
    try:
        return TypeAdapter(_GENERATORS[kind]).validate_python(config)
    except ValidationError as e:
        msg = f"Invalid config for generator kind {kind!r}: {e}"
        raise GeneratorError(msg) from e


def parse_generator(data: GenSpec | BaseGenerator) -> BaseGenerator:
    """
    Parse the input into a `BaseGenerator` subclass.

    If the input is already a `BaseGenerator`, it is returned as-is. Otherwise, the input
    is presumed to be a `GenSpec` and is passed to `resolve_generator`.
    """
    if isinstance(data, BaseGenerator):
        return data
    return resolve_generator(cast(GenSpec, data))


def generate(spec: GenSpec) -> Digraph:
    """
    Generate the digraph described by a `GenSpec`. Identical specs give identical digraphs.
    """
    generator = resolve_generator(spec)
    try:
        seed = _SEED.validate_python(spec.get("seed", 0))
    except ValidationError as e:
        msg = f"Invalid seed {spec.get('seed')!r}: seeds are unsigned 64-bit integers."
        raise GeneratorError(msg) from e
    return generator.generate(seed)


class Fixture(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    digraph: Digraph
    provenance: str


FIG_D_ARCS: tuple[Arc, ...] = (
    (1, 3),
    (2, 1),
    (2, 3),
    (3, 2),
    (3, 4),
    (4, 6),
    (5, 2),
    (6, 5),
    (6, 7),
    (7, 8),
    (8, 6),
)

FIXTURES: dict[str, Fixture] = {
    fx.name: fx
    for fx in (
        Fixture(
            name="FIG_D",
            digraph=Digraph(n=8, arcs=FIG_D_ARCS),
            provenance=(
                "Strongly connected balanced digraph on 8 vertices with 11 arcs; the "
                "one-point union of FIG_D1 and the triangle 6 -> 7 -> 8 -> 6 at vertex 6."
            ),
        ),
        Fixture(
            name="FIG_D1",
            digraph=Digraph(n=6, arcs=FIG_D_ARCS[:8]),
            provenance="The 6-vertex block of FIG_D, obtained by deleting vertices 7 and 8.",
        ),
        Fixture(
            name="FIG_D2_TRIANGLE",
            digraph=gen_cycle(3),
            provenance=(
                "The triangle glued onto FIG_D1, labelled 1 -> 2 -> 3 -> 1; vertex 1 "
                "lands on vertex 6 of FIG_D1."
            ),
        ),
        Fixture(
            name="CEX",
            digraph=Digraph(n=4, arcs=((1, 3), (1, 4), (2, 1), (3, 1), (4, 1), (4, 2))),
            provenance=(
                "Strongly connected but unbalanced digraph on 4 vertices where "
                "r_31 = 23/20 exceeds d_31 = 1, so balance cannot be dropped."
            ),
        ),
        Fixture(name="DIGON", digraph=gen_cycle(2), provenance="The 2-cycle 1 <-> 2."),
        Fixture(name="C3", digraph=gen_cycle(3), provenance="The directed 3-cycle 1 -> 2 -> 3 -> 1."),
    )
}


def fixture(name: str) -> Digraph:
    """
    A built-in digraph by name. See `FIXTURES` for names and provenance.
    """
    if name not in FIXTURES:
        msg = f"Unknown fixture {name!r}. Expected one of {sorted(FIXTURES)}."
        raise GeneratorError(msg)
    return FIXTURES[name].digraph
