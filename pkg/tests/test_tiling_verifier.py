from fractions import Fraction
import random

import polars as pl
import pytest

from lib.errors import InputError
from lib.exact.polytope import LinearForm
from lib.matroid import hypersimplex
from lib.tiling import Piece, TilingSpec, load_table
from lib.tiling_verifier import (
    REPORT_SCHEMA,
    VerdictKind,
    chamber_oracle,
    check_cover_and_disjoint,
    maximal_disjoint_subsets,
    report_frame,
    write_report,
)

X = LinearForm.variable
DELTA = hypersimplex(2, 4)
LOW = (X("x1") + X("x2")).le(1)
HIGH = (X("x1") + X("x2")).ge(1)


def tiling(*pieces, partial=False) -> TilingSpec:
    return TilingSpec(
        "T", "delta24", DELTA,
        tuple(Piece(f"P{i}", tuple(constraints), DELTA) for i, constraints in enumerate(pieces, start=1)),
        partial=partial,
    )


def test_two_halves_tile():
    report = check_cover_and_disjoint(tiling([LOW], [HIGH]), oracle=True)
    assert report.volumes == [2, 2]
    assert report.ambient_volume == 4
    assert report.verdict.kind is VerdictKind.VALID
    assert report.oracle is VerdictKind.VALID
    assert report.passed
    assert report.format().splitlines()[-2:] == ["VALID", "  chambers VALID"]


def test_single_piece_equal_to_ambient():
    report = check_cover_and_disjoint(tiling([X("x1").le(1)]))
    assert report.verdict.kind is VerdictKind.VALID
    assert report_frame([report]).filter(pl.col("kind") == "piece").height == 1


def test_gap_witness_is_uncovered():
    report = check_cover_and_disjoint(tiling([LOW]), oracle=True)
    assert report.verdict.kind is VerdictKind.GAP
    assert report.oracle is VerdictKind.GAP
    witness = report.verdict.point
    assert DELTA.contains_point(witness)
    assert witness["x1"] + witness["x2"] > 1
    assert not report.passed
    assert report.verdict.format(DELTA.vars).startswith("GAP (")


def test_partial_tilings_never_fail():
    report = check_cover_and_disjoint(tiling([LOW], partial=True))
    assert report.verdict.kind is VerdictKind.GAP
    assert report.passed


def test_overlap_reports_pair_and_disjoint_subsets():
    report = check_cover_and_disjoint(tiling([LOW], [X("x1").le(1)]), oracle=True)
    assert report.verdict.kind is VerdictKind.OVERLAP
    assert report.verdict.pair == ("P1", "P2")
    assert report.oracle is VerdictKind.OVERLAP
    witness = report.verdict.point
    assert witness["x1"] + witness["x2"] < 1
    covers = {s.members: s.covers for s in report.subsets}
    assert covers == {("P1",): False, ("P2",): True}


def test_irrelevant_piece_fails_the_row():
    corner = (X("x1") + X("x2")).ge(2)
    report = check_cover_and_disjoint(tiling([X("x1").le(1)], [corner]))
    assert [r.relevant for r in report.relevance] == [True, False]
    assert report.volumes[1] == 0
    assert report.verdict.kind is VerdictKind.VALID
    assert not report.passed
    assert "IRRELEVANT" in report.format()


def test_maximal_disjoint_subsets():
    pieces = tiling([LOW], [HIGH], [X("x1").le(1)]).pieces
    assert maximal_disjoint_subsets(pieces, [(0, 2, None), (1, 2, None)]) == [(0, 1), (2,)]


def test_chamber_oracle_dimension_limit():
    big = hypersimplex(2, 7)
    with pytest.raises(InputError):
        chamber_oracle(big, [Piece("P", (X("x1").le(Fraction(1, 2)),), big)])


def test_report_files(tmp_path):
    reports = [check_cover_and_disjoint(tiling([LOW], [HIGH]))]
    write_report(reports, tmp_path / "r.json", tmp_path / "r.csv")
    frame = pl.read_csv(tmp_path / "r.csv")
    assert frame.columns == list(REPORT_SCHEMA)
    assert frame.height == report_frame(reports).height == 5
    assert (tmp_path / "r.json").stat().st_size > 0


def test_verdict_does_not_depend_on_piece_order():
    rng = random.Random(11)
    halfspaces = [LOW, HIGH, X("x1").le(Fraction(1, 2)), X("x1").ge(Fraction(1, 2)), (X("x1") + X("x3")).le(1)]
    for _ in range(15):
        pieces = [rng.sample(halfspaces, rng.randint(1, 2)) for _ in range(rng.randint(1, 4))]
        shuffled = rng.sample(pieces, len(pieces))
        first = check_cover_and_disjoint(tiling(*pieces), workers=1)
        second = check_cover_and_disjoint(tiling(*shuffled), workers=1)
        assert first.verdict.kind is second.verdict.kind
        assert sorted(first.volumes) == sorted(second.volumes)
        assert first.ambient_volume == second.ambient_volume


# ------ Shipped tables ------ #
def _row(data_dir, table: str, row: str) -> TilingSpec:
    return next(t for t in load_table(data_dir / f"{table}.tiling") if t.name == row)


def _point(text: str) -> dict[str, Fraction]:
    return {name: Fraction(value) for name, value in (item.split("=") for item in text.split())}


def _strictly_inside(polytope, point) -> bool:
    return all(c.is_satisfied_by(point) for c in polytope.equalities) and all(c.slack(point) > 0 for c in polytope.inequalities)


# First overlapping pair (in piece order) and an interior point of it, for the rows as transcribed
OVERLAP_WITNESSES = [
    ("table1", "1", ("M1", "M3"), "a0=.2 a1=.44 a2=.23 b0=.49 b1=.49 b2=.2 c0=.45 c1=.05 c2=.45"),
    ("table1", "2", ("M1", "M2"), "a0=.2 a1=.44 a2=.23 b0=.49 b1=.49 b2=.2 c0=.45 c1=.05 c2=.45"),
    ("table1", "3", ("M1", "M3"), "a0=.25 a1=.41 a2=.45 b0=.49 b1=.25 b2=.25 c0=.3 c1=.3 c2=.3"),
    ("table1", "4", ("M1", "M2"), "a0=.4 a1=.3 a2=.4 b0=.1 b1=.3 b2=.4 c0=.3 c1=.35 c2=.45"),
    ("table1", "5", ("M1", "M3"), "a0=.4 a1=.2 a2=.45 b0=.3 b1=.3 b2=.4 c0=.35 c1=.3 c2=.3"),
    ("table2", "1", ("M1", "M2"), "a0=.45 a1=.2 a2=.3 b0=.45 b1=.29 b2=.3 c0=.28 c1=.45 c2=.28"),
    ("table3", "2", ("M2", "M3"), "a0=.45 a1=.2 a2=.4 b0=.45 b1=.3 b2=.2 c0=.4 c1=.15 c2=.45"),
]
GAP_WITNESS = ("table2", "2", "a0=.3 a1=.3 a2=.3 b0=.45 b1=.32 b2=.3 c0=.4 c1=.33 c2=.3")


@pytest.mark.parametrize(("table", "row", "pair", "point"), OVERLAP_WITNESSES)
def test_transcribed_rows_overlap_in_the_interior(data_dir, table, row, pair, point):
    tiling = _row(data_dir, table, row)
    first, second = (tiling.piece(name) for name in pair)
    assert _strictly_inside(first.polytope.with_constraints(second.constraints), _point(point))


def test_second_nodal_row_leaves_an_open_gap(data_dir):
    table, row, point = GAP_WITNESS
    tiling = _row(data_dir, table, row)
    point = _point(point)
    assert _strictly_inside(tiling.ambient, point)
    assert not any(p.polytope.contains_point(point) for p in tiling.pieces)


EXPECTED_VERDICTS = {
    **{(table, row): (VerdictKind.OVERLAP, pair) for table, row, pair, _ in OVERLAP_WITNESSES},
    ("table1", "6"): (VerdictKind.VALID, None),
    ("table2", "2"): (VerdictKind.GAP, None),
    **{("table2", row): (VerdictKind.VALID, None) for row in ("3", "4", "5", "6", "7", "8")},
    ("table3", "1"): (VerdictKind.VALID, None),
    **{("ap09_table2", row): (VerdictKind.VALID, None) for row in ("1", "2", "8", "9", "10")},
    ("ap09_table2", "5"): (VerdictKind.GAP, None),
}


@pytest.mark.tables
@pytest.mark.parametrize(("table", "row"), list(EXPECTED_VERDICTS))
def test_shipped_row_verdicts(table_report, table, row):
    kind, pair = EXPECTED_VERDICTS[(table, row)]
    report = table_report(table, row)
    verdict = report.verdict
    ambient = report.tiling.ambient
    assert verdict.kind is kind
    assert verdict.pair == pair
    if kind is VerdictKind.GAP:
        assert ambient.contains_point(verdict.point)
        assert not any(p.polytope.contains_point(verdict.point) for p in report.tiling.pieces)
    elif kind is VerdictKind.OVERLAP:
        first, second = (report.tiling.piece(name).polytope for name in pair)
        assert first.contains_point(verdict.point) and second.contains_point(verdict.point)
    else:
        assert report.total == report.ambient_volume


@pytest.mark.tables
@pytest.mark.parametrize(("table", "row"), [("table1", "6"), ("table2", "4"), ("table3", "1"), ("ap09_table2", "8"),
                                            ("ap09_table2", "10")])
def test_pinned_rows_pass(table_report, table, row):
    assert table_report(table, row).passed


@pytest.mark.tables
def test_last_degree_four_row_has_an_irrelevant_piece(table_report):
    report = table_report("table2", "8")
    assert [r.relevant for r in report.relevance] == [True, False]
    assert not report.passed


@pytest.mark.tables
def test_partial_row_passes_with_a_gap(table_report):
    report = table_report("ap09_table2", "5")
    assert report.total < report.ambient_volume
    assert report.passed
