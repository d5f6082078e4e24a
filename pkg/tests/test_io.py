from __future__ import annotations

import json
from fractions import Fraction

import pytest

from digraph_resistance.core import DigraphFormatError
from digraph_resistance.digraph import Digraph, shortest_distances
from digraph_resistance.generators import FIXTURES, fixture, gen_balanced_random, gen_cactus
from digraph_resistance.io import (
    compute_report,
    dump_json,
    emit_digraph,
    emit_edges,
    emit_json,
    fixture_listing,
    parse_digraph,
    parse_edges,
    parse_json,
    read_digraph,
    render_rat,
    resistance_table,
    verify_payload,
    write_digraph,
)
from digraph_resistance.spectral import resistance
from digraph_resistance.verify import check_conjecture


@pytest.mark.parametrize("fmt", ["edges", "json"])
@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixtures_survive_both_formats(name: str, fmt: str) -> None:
    d = fixture(name)
    assert parse_digraph(emit_digraph(d, fmt), fmt) == d


@pytest.mark.parametrize("seed", range(25))
def test_generated_digraphs_survive_both_formats(seed: int) -> None:
    for d in (gen_balanced_random(7, 12, seed), gen_cactus(4, (2, 4), seed)):
        assert parse_edges(emit_edges(d)) == d
        assert parse_json(emit_json(d)) == d


def test_files(tmp_path) -> None:
    d = fixture("FIG_D")
    path = tmp_path / "fig_d.txt"
    write_digraph(d, path, "edges")
    assert path.read_text().startswith("n 8\n1 3\n2 1\n")
    assert read_digraph(path, "edges") == d


def test_parse_edges_comments_and_inferred_n() -> None:
    text = "# a triangle\n\n1 2   # first arc\n2 3\n3 1\n"
    assert parse_edges(text) == fixture("C3")


def test_parse_edges_header_keeps_isolated_labels() -> None:
    d = parse_edges("n 4\n1 2\n2 1\n")
    assert d.n == 4
    assert d.arcs == ((1, 2), (2, 1))


@pytest.mark.parametrize(
    "text, line, reason",
    [
        ("n 3\n1 2\n2 2\n", 3, "self-loop"),
        ("n 3\n1 2\n1 2\n", 3, "duplicate arc"),
        ("n 3\n1 2\n2 4\n", 3, "outside 1..3"),
        ("1 2\n0 1\n", 2, "1-based"),
        ("1 2\n2 x\n", 2, "integers"),
        ("1 2 3\n", 1, "expected an arc"),
        ("1 2\nn 3\n", 2, "before any arc"),
        ("n zero\n", 1, "N >= 1"),
    ],
)
def test_parse_edges_errors(text: str, line: int, reason: str) -> None:
    with pytest.raises(DigraphFormatError, match=reason) as excinfo:
        parse_edges(text)
    assert excinfo.value.line == line
    assert str(excinfo.value).startswith(f"line {line}: ")


def test_parse_edges_empty() -> None:
    with pytest.raises(DigraphFormatError) as excinfo:
        parse_edges("# nothing here\n")
    assert excinfo.value.line is None


@pytest.mark.parametrize(
    "doc, index",
    [
        ({"n": 3, "arcs": [[1, 2], [2, 3], [3, 3]]}, 3),
        ({"n": 3, "arcs": [[1, 2], [1, 2]]}, 2),
        ({"n": 3, "arcs": [[1, 2, 3]]}, 1),
        ({"n": 3, "arcs": [[1, True]]}, 1),
        ({"n": 2, "arcs": [[1, 2], [2, 5]]}, 2),
    ],
)
def test_parse_json_arc_errors(doc: dict, index: int) -> None:
    with pytest.raises(DigraphFormatError) as excinfo:
        parse_json(json.dumps(doc))
    assert excinfo.value.line == index


@pytest.mark.parametrize(
    "text",
    ['{"arcs": []}', '{"n": 0, "arcs": []}', '{"n": 2, "arcs": {}}', "[1, 2]"],
)
def test_parse_json_document_errors(text: str) -> None:
    with pytest.raises(DigraphFormatError) as excinfo:
        parse_json(text)
    assert excinfo.value.line is None


def test_parse_json_syntax_error() -> None:
    with pytest.raises(DigraphFormatError, match="invalid JSON"):
        parse_json('{"n": 2,\n "arcs": [[1, 2],]}')


def test_unknown_format() -> None:
    with pytest.raises(ValueError, match="Unknown graph format"):
        parse_digraph("1 2\n", "yaml")  # type: ignore[arg-type]


def test_resistance_table_fig_d() -> None:
    d = fixture("FIG_D")
    table = resistance_table(d, resistance(d), shortest_distances(d))
    lines = table.splitlines()
    assert lines[0].split() == ["i", "j", "r_exact", "r_decimal", "d", "r<=d"]
    assert len(lines) == 1 + 8 * 7
    assert lines[2].split() == ["1", "3", "5/8", "0.6250", "1", "yes"]
    assert "NO" not in table
    assert all(not line.endswith(" ") for line in lines)


def test_resistance_table_cex_marks_violation() -> None:
    d = fixture("CEX")
    table = resistance_table(d, resistance(d), shortest_distances(d))
    row = next(line.split() for line in table.splitlines()[1:] if line.split()[:2] == ["3", "1"])
    assert row == ["3", "1", "23/20", "1.1500", "1", "NO"]


def test_compute_report_fig_d() -> None:
    d = fixture("FIG_D")
    report = compute_report(
        d, resistance(d), shortest_distances(d), tool_version="0.1.0", config={"precision": 4}
    )
    assert report.balanced
    assert report.kappa == {"exact": "2", "decimal": "2.0000"}
    assert report.laplacian_pinv.exact[0][0] == "13/16"
    assert report.resistance.exact[0][2] == "5/8"
    assert report.distances[0][2] == 1


def test_verify_payload_drops_timings() -> None:
    report = check_conjecture(fixture("CEX"))
    assert report.timings
    body = verify_payload(report, tool_version="0.1.0", config={})
    assert "timings" not in body
    assert verify_payload(report, tool_version="0.1.0", config={}, timings=True)["timings"]
    violation = next(v for v in body["violations"] if (v["i"], v["j"]) == (3, 1))
    assert violation["r"] == "23/20"
    assert violation["r_decimal"] == "1.1500"
    assert violation["d"] == 1


def test_verify_payload_worst_arc_decimal() -> None:
    body = verify_payload(check_conjecture(fixture("FIG_D")), tool_version="0.1.0", config={})
    assert body["worst_arc_resistance"] == "7/8"
    assert body["worst_arc_resistance_decimal"] == "0.8750"


def test_render_rat() -> None:
    assert render_rat(Fraction(2, 3), 3) == {"exact": "2/3", "decimal": "0.667"}


def test_dump_json_is_stable() -> None:
    doc = {"b": 1, "a": [1, 2]}
    assert dump_json(doc) == dump_json(dict(doc))
    assert dump_json(doc).endswith("}\n")


def test_fixture_listing() -> None:
    listing = fixture_listing((("DIGON", 2, 2, "two"), ("FIG_D", 8, 11, "eight")))
    assert listing.splitlines() == ["DIGON  n=2   arcs=2   two", "FIG_D  n=8   arcs=11  eight"]


def test_digraph_model_json() -> None:
    d = fixture("C3")
    assert Digraph.model_validate_json(d.model_dump_json()) == d


@pytest.mark.parametrize("fmt, line", [("edges", 2), ("json", None)])
def test_read_digraph_rejects_invalid_utf8(tmp_path, fmt: str, line: int | None) -> None:
    path = tmp_path / "graph"
    path.write_bytes(b"3 3\n\xff\xfe\n")
    with pytest.raises(DigraphFormatError, match="not UTF-8") as excinfo:
        read_digraph(path, fmt)
    assert excinfo.value.line == line
