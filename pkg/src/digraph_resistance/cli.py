"""
Command-line interface.

Exit codes: 0 when every check holds, 1 when a mathematical violation is found,
2 for input or usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path
from typing import TYPE_CHECKING, Any, List, Literal, Optional, Sequence

import dask
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from digraph_resistance import __version__
from digraph_resistance.core import (
    DEFAULT_PRECISION,
    DigraphResistanceError,
    GeneratorError,
    IdentityViolationError,
    Rational,
    format_decimal,
)
from digraph_resistance.digraph import (
    Digraph,
    block_subgraph,
    blocks,
    class_c_certificate,
    is_balanced,
    is_directed_cactus,
    is_strongly_connected,
    shortest_distances,
)
from digraph_resistance.generators import FIXTURES, GenSpec, fixture, generate
from digraph_resistance.io import (
    compute_report,
    decompose_report,
    dump_json,
    emit_digraph,
    fixture_listing,
    read_digraph,
    resistance_table,
    verify_payload,
)
from digraph_resistance.spectral import resistance
from digraph_resistance.verify import (
    check_conjecture,
    check_identities,
    verify_theorem_main,
)

if TYPE_CHECKING:
    from digraph_resistance.verify import VerifyReport

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

Command = Literal["compute", "verify", "decompose", "gen", "fixtures", "explore"]
ExploreKind = Literal["cactus", "class_c", "overlap", "ring"]

# explore kinds whose samples are covered by a theorem; a miss there is a violation
_PREDICTED = ("cactus", "class_c")


class CliConfig(BaseModel):
    """
    The fully resolved configuration of one invocation. Embedded in every report.
    """

    model_config = ConfigDict(frozen=True)

    command: Command
    input: Optional[Path] = None
    fixture: Optional[str] = None
    format: Literal["edges", "json"] = "edges"
    output: Optional[Path] = None
    output_format: Literal["json", "table"] = "json"
    precision: int = Field(DEFAULT_PRECISION, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    exact_only: bool = False
    identities: bool = False
    theorem: bool = False
    timings: bool = False
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "WARNING"
    scheduler: Literal["synchronous", "threads", "processes"] = "synchronous"
    count: int = Field(100, ge=1)
    kind: Optional[str] = None
    blocks: int = Field(3, ge=1)
    n: int = Field(8, ge=2)
    arcs: int = Field(14, ge=2)
    cycle_min: int = Field(2, ge=2)
    cycle_max: int = Field(5, ge=2)
    spec: Optional[Path] = None

    @model_validator(mode="after")
    def _one_input_source(self) -> CliConfig:
        if self.command in ("compute", "verify", "decompose"):
            if (self.input is None) == (self.fixture is None):
                msg = f"{self.command} needs exactly one of --input and --fixture."
                raise ValueError(msg)
        if self.cycle_min > self.cycle_max:
            msg = f"--cycle-min ({self.cycle_min}) exceeds --cycle-max ({self.cycle_max})."
            raise ValueError(msg)
        return self

    def report_config(self) -> dict[str, Any]:
        return self.model_dump(mode="json", exclude={"log_level"})


class GapWitness(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int
    i: int
    j: int
    r: Rational
    d: int
    gap: Rational


class ExploreSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    seed: int
    status: Literal["tested", "discarded", "unbalanced"]
    holds: Optional[bool] = None
    worst: Optional[GapWitness] = None


class ExploreSummary(BaseModel):
    """
    Aggregate of an exploration batch. `max_gap` is the pair with the largest
    `r_ij - d_ij` over every tested sample (negative when all pairs hold strictly).
    """

    model_config = ConfigDict(frozen=True)

    tool_version: str
    config: dict[str, Any]
    kind: ExploreKind
    count: int
    tested: int
    holding: int
    discarded: int
    unbalanced: int
    failing_seeds: List[int]
    max_gap: Optional[GapWitness]
    max_gap_decimal: Optional[str]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", type=Path, help="Path to a graph file.")
    common.add_argument("--fixture", help="Name of a built-in graph.")
    common.add_argument("--format", choices=("edges", "json"), default="edges")
    common.add_argument("--output", type=Path, help="Write the report here instead of stdout.")
    common.add_argument("--output-format", choices=("json", "table"), default="json")
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--exact-only", action="store_true", help="Omit decimal renderings.")
    common.add_argument("--identities", action="store_true")
    common.add_argument("--theorem", action="store_true")
    common.add_argument("--timings", action="store_true", help="Include phase timings.")
    common.add_argument(
        "--log-level",
        choices=("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"),
        default="WARNING",
    )
    common.add_argument(
        "--scheduler", choices=("synchronous", "threads", "processes"), default="synchronous"
    )
    common.add_argument("--count", type=int, default=100)
    common.add_argument("--kind")
    common.add_argument("--blocks", type=int, default=3)
    common.add_argument("--n", type=int, default=8)
    common.add_argument("--arcs", type=int, default=14)
    common.add_argument("--cycle-min", type=int, default=2)
    common.add_argument("--cycle-max", type=int, default=5)
    common.add_argument("--spec", type=Path, help="A JSON GenSpec for gen.")

    parser = argparse.ArgumentParser(
        prog="digraph-resistance",
        description="Exact resistance distances on digraphs.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "compute": "Laplacian, pseudoinverse, resistance and distance matrices.",
        "verify": "Check r_ij <= d_ij, optionally with identity suites and the block theorem.",
        "decompose": "Blocks, cut vertices, cactus verdict and class C certificate.",
        "gen": "Generate a digraph from a GenSpec or from flags.",
        "fixtures": "List the built-in graphs, or emit one with --fixture.",
        "explore": "Batch-check r_ij <= d_ij on generated digraphs.",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def _load(cfg: CliConfig) -> Digraph:
    if cfg.fixture is not None:
        return fixture(cfg.fixture)
    assert cfg.input is not None
    return read_digraph(cfg.input, cfg.format)


def _write(cfg: CliConfig, text: str) -> None:
    if cfg.output is None:
        sys.stdout.write(text)
    else:
        cfg.output.write_text(text)


def _strip_decimals(doc: Any) -> Any:
    if isinstance(doc, dict):
        return {
            k: _strip_decimals(v)
            for k, v in doc.items()
            if k != "decimal" and not k.endswith("_decimal")
        }
    if isinstance(doc, list):
        return [_strip_decimals(v) for v in doc]
    return doc


def _emit_report(cfg: CliConfig, doc: BaseModel | dict[str, Any]) -> None:
    if cfg.exact_only:
        body = doc.model_dump(mode="json") if isinstance(doc, BaseModel) else doc
        _write(cfg, dump_json(_strip_decimals(body)))
    else:
        _write(cfg, dump_json(doc))


def cmd_compute(cfg: CliConfig) -> int:
    d = _load(cfg)
    result = resistance(d)
    dist = shortest_distances(d)
    if cfg.output_format == "table":
        _write(cfg, resistance_table(d, result, dist, cfg.precision))
    else:
        report = compute_report(
            d,
            result,
            dist,
            tool_version=__version__,
            config=cfg.report_config(),
            precision=cfg.precision,
        )
        _emit_report(cfg, report)
    return EXIT_OK


def _verdict(report: VerifyReport) -> bool:
    return (
        report.conjecture_holds
        and report.theorem_consistent is not False
        and all(item.status != "fail" for item in report.identity_results.values())
    )


def cmd_verify(cfg: CliConfig) -> int:
    d = _load(cfg)
    report = verify_theorem_main(d) if cfg.theorem else check_conjecture(d)
    if cfg.identities:
        report = report.model_copy(update={"identity_results": check_identities(d)})
    if cfg.output_format == "table":
        _write(cfg, resistance_table(d, resistance(d), shortest_distances(d), cfg.precision))
    else:
        payload = verify_payload(
            report,
            tool_version=__version__,
            config=cfg.report_config(),
            precision=cfg.precision,
            timings=cfg.timings,
        )
        _emit_report(cfg, payload)
    return EXIT_OK if _verdict(report) else EXIT_VIOLATION


def _block_holds(piece: Digraph) -> bool | None:
    if not is_strongly_connected(piece):
        return None
    return check_conjecture(piece).conjecture_holds


def cmd_decompose(cfg: CliConfig) -> int:
    d = _load(cfg)
    decomposition = blocks(d)
    balanced = is_balanced(d)
    per_block = [
        _block_holds(block_subgraph(decomposition, idx)[0])
        for idx in range(len(decomposition.blocks))
    ]
    certificate = None
    if balanced:
        certificate = class_c_certificate(d, lambda piece: bool(_block_holds(piece)))
    report = decompose_report(
        d,
        decomposition,
        cactus=is_directed_cactus(d),
        balanced=balanced,
        certificate=certificate,
        block_conjecture=per_block,
        tool_version=__version__,
        config=cfg.report_config(),
    )
    _emit_report(cfg, report)
    return EXIT_OK


def gen_spec_from(cfg: CliConfig) -> GenSpec:
    """
    The GenSpec for `gen`: read from `--spec` when given, otherwise built from flags.
    """
    if cfg.spec is not None:
        try:
            spec = json.loads(cfg.spec.read_bytes().decode("utf-8"))
        except json.JSONDecodeError as e:
            msg = f"{cfg.spec} is not valid JSON: {e.msg}"
            raise GeneratorError(msg) from e
        except UnicodeDecodeError as e:
            msg = f"{cfg.spec} is not UTF-8 text: {e.reason}"
            raise GeneratorError(msg) from e
        if not isinstance(spec, dict) or "kind" not in spec:
            msg = f"{cfg.spec} must hold an object with a 'kind' key."
            raise GeneratorError(msg)
        return GenSpec(kind=spec["kind"], config=spec.get("config", {}), seed=spec.get("seed", 0))
    kind = cfg.kind or "balanced_random"
    configs: dict[str, dict[str, Any]] = {
        "cycle": {"n": cfg.n},
        "digon": {},
        "balanced_random": {"n": cfg.n, "arcs": cfg.arcs},
        "cactus": {"blocks": cfg.blocks, "cycle_min": cfg.cycle_min, "cycle_max": cfg.cycle_max},
        "class_c_union": {"blocks": cfg.blocks, "size_min": cfg.cycle_min, "size_max": cfg.cycle_max},
        "ring_union": {"pieces": cfg.blocks, "cycle_min": cfg.cycle_min, "cycle_max": cfg.cycle_max},
        "two_point_union": {"size_min": cfg.cycle_min, "size_max": cfg.cycle_max},
    }
    if kind not in configs:
        msg = f"Unknown generator kind {kind!r}. Expected one of {sorted(configs)}."
        raise GeneratorError(msg)
    return GenSpec(kind=kind, config=configs[kind], seed=cfg.seed)  # type: ignore[typeddict-item]


def cmd_gen(cfg: CliConfig) -> int:
    d = generate(gen_spec_from(cfg))
    _write(cfg, emit_digraph(d, cfg.format))
    return EXIT_OK


def cmd_fixtures(cfg: CliConfig) -> int:
    if cfg.fixture is not None:
        _write(cfg, emit_digraph(fixture(cfg.fixture), cfg.format))
        return EXIT_OK
    entries = tuple(
        (name, fx.digraph.n, len(fx.digraph.arcs), fx.provenance) for name, fx in FIXTURES.items()
    )
    _write(cfg, fixture_listing(entries))
    return EXIT_OK


def explore_spec(kind: ExploreKind, cfg: CliConfig, seed: int) -> GenSpec:
    sizes = {"cycle_min": cfg.cycle_min, "cycle_max": cfg.cycle_max}
    if kind == "cactus":
        return GenSpec(kind="cactus", config={"blocks": cfg.blocks, **sizes}, seed=seed)
    if kind == "class_c":
        config = {"blocks": cfg.blocks, "size_min": cfg.cycle_min, "size_max": cfg.cycle_max}
        return GenSpec(kind="class_c_union", config=config, seed=seed)
    if kind == "ring":
        return GenSpec(kind="ring_union", config={"pieces": cfg.blocks, **sizes}, seed=seed)
    if kind == "overlap":
        config = {"size_min": cfg.cycle_min, "size_max": cfg.cycle_max}
        return GenSpec(kind="two_point_union", config=config, seed=seed)
    msg = f"Unknown explore kind {kind!r}. Expected one of cactus, class_c, overlap, ring."
    raise GeneratorError(msg)


def explore_one(index: int, spec: GenSpec) -> ExploreSample:
    """
    Generate and check one exploration sample.
    """
    seed = spec["seed"]
    try:
        d = generate(spec)
    except GeneratorError as e:
        logger.debug("sample %d discarded: %s", index, e)
        return ExploreSample(index=index, seed=seed, status="discarded")
    if not is_balanced(d):
        return ExploreSample(index=index, seed=seed, status="unbalanced")
    result = resistance(d)
    report = check_conjecture(d, result)
    dist = shortest_distances(d)
    worst: GapWitness | None = None
    for i in d.vertices:
        for j in d.vertices:
            if i == j:
                continue
            r, dd = result.r(i, j), dist[i - 1][j - 1]
            gap = r - dd
            if worst is None or gap > worst.gap:
                worst = GapWitness(seed=seed, i=i, j=j, r=r, d=int(dd), gap=gap)
    return ExploreSample(
        index=index, seed=seed, status="tested", holds=report.conjecture_holds, worst=worst
    )


def cmd_explore(cfg: CliConfig) -> int:
    kind = cfg.kind or "cactus"
    if kind not in ("cactus", "class_c", "overlap", "ring"):
        msg = f"Unknown explore kind {kind!r}. Expected one of cactus, class_c, overlap, ring."
        raise GeneratorError(msg)
    specs = [explore_spec(kind, cfg, (cfg.seed + k) % 2**64) for k in range(cfg.count)]  # type: ignore[arg-type]
    tasks = [dask.delayed(explore_one)(k, spec) for k, spec in enumerate(specs)]
    samples = sorted(dask.compute(*tasks, scheduler=cfg.scheduler), key=lambda s: s.index)
    tested = [s for s in samples if s.status == "tested"]
    failing = [s.seed for s in tested if not s.holds]
    gaps = [s.worst for s in tested if s.worst is not None]
    max_gap = max(gaps, key=lambda w: w.gap, default=None)
    summary = ExploreSummary(
        tool_version=__version__,
        config=cfg.report_config(),
        kind=kind,  # type: ignore[arg-type]
        count=cfg.count,
        tested=len(tested),
        holding=len(tested) - len(failing),
        discarded=sum(s.status == "discarded" for s in samples),
        unbalanced=sum(s.status == "unbalanced" for s in samples),
        failing_seeds=failing,
        max_gap=max_gap,
        max_gap_decimal=None if max_gap is None else format_decimal(max_gap.gap, cfg.precision),
    )
    _emit_report(cfg, summary)
    if failing and kind in _PREDICTED:
        logger.critical("%d %s samples have r_ij > d_ij: seeds %s", len(failing), kind, failing)
        return EXIT_VIOLATION
    return EXIT_OK


_COMMANDS = {
    "compute": cmd_compute,
    "verify": cmd_verify,
    "decompose": cmd_decompose,
    "gen": cmd_gen,
    "fixtures": cmd_fixtures,
    "explore": cmd_explore,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = CliConfig(**vars(args))
    except ValidationError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE
    logging.basicConfig(level=cfg.log_level, format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default", RuntimeWarning)
            return _COMMANDS[cfg.command](cfg)
    except IdentityViolationError as e:
        logger.critical("%s", e)
        return EXIT_VIOLATION
    except (DigraphResistanceError, ValidationError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
