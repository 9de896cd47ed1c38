from dataclasses import replace
from fractions import Fraction
import random

import pytest

from lib.burniat import get_ambient, pullback, symmetry_map
from lib.errors import InputError, ParseError
from lib.exact.polytope import HPolytope, LinearForm
from lib.exact.vertices import with_implicit_equalities
from lib.tiling import format_tilings, load_table, parse_tilings, restrict_tiling
from lib.tiling_verifier import find_overlaps, same_tiling

SAMPLE = """
# two rows
tiling T1-6 ambient=bur5 source=table1:6
piece M1: a1a2b1b2c1c2 <= 2
piece M2: a0 + b0 + c0 <= 1

tiling part ambient=bur6 partial=yes
piece M1: a1 + a3 + b1 <= 1, a1c0c2 <= 1
"""


def test_parse_sample():
    first, second = parse_tilings(SAMPLE)
    assert (first.name, first.ambient_name, first.source, first.partial) == ("T1-6", "bur5", "table1:6", False)
    assert [p.name for p in first.pieces] == ["M1", "M2"]
    assert first.pieces[0].constraints[0] == LinearForm.total(["a1", "a2", "b1", "b2", "c1", "c2"]).le(2)
    assert second.partial
    a3 = get_ambient("bur6").aliases["a3"]
    assert second.pieces[0].constraints[0] == (LinearForm.total(["a1", "b1"]) + a3).le(1)


def test_ambient_override():
    tilings = parse_tilings(SAMPLE, ambient="bur3")
    assert {t.ambient_name for t in tilings} == {"bur3"}


def test_format_round_trip():
    tilings = parse_tilings(SAMPLE)
    again = parse_tilings(format_tilings(tilings))
    assert [[p.constraints for p in t.pieces] for t in again] == [[p.constraints for p in t.pieces] for t in tilings]
    assert format_tilings(again) == format_tilings(tilings)


@pytest.mark.parametrize(("text", "line"), [
    ("piece M1: a0 <= 1\n", 1),
    ("tiling T\npiece M1: a0 <= 1\n", 1),
    ("tiling T ambient=bur5 colour=red\n", 1),
    ("tiling T ambient=bur5\npiece M1: a0 <= 1\npiece M1: b0 <= 1\n", 3),
    ("tiling T ambient=bur5\npiece M1: a0 + q7 <= 1\n", 2),
    ("tiling T ambient=bur9\n", 1),
    ("tiling T ambient=bur5\npiece M1:\n", 2),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as info:
        parse_tilings(text, "t.tiling")
    assert info.value.line == line


def test_empty_file_has_no_tilings():
    assert parse_tilings("# nothing here\n") == []


def test_shipped_tables(data_dir):
    counts = {name: len(load_table(data_dir / f"{name}.tiling")) for name in ("table1", "table2", "table3", "ap09_table2")}
    assert counts == {"table1": 6, "table2": 8, "table3": 2, "ap09_table2": 6}
    ambients = [t.ambient_name for t in load_table(data_dir / "table2.tiling")]
    assert ambients == ["bur4-nodal"] * 5 + ["bur4-nonnodal"] * 3


def _ap09(data_dir, name):
    return next(t for t in load_table(data_dir / "ap09_table2.tiling") if t.name == name)


def test_restrict_to_own_ambient_is_identity(data_dir):
    tiling = load_table(data_dir / "table1.tiling")[0]
    restriction = restrict_tiling(tiling, get_ambient("bur5"))
    assert restriction.dropped == ()
    assert restriction.tiling == tiling


def test_restrict_to_larger_ambient_fails(data_dir):
    tiling = load_table(data_dir / "table1.tiling")[0]
    with pytest.raises(InputError):
        restrict_tiling(tiling, get_ambient("bur6"))


def test_restricting_ten_drops_one_piece(data_dir):
    restriction = restrict_tiling(_ap09(data_dir, "10"), get_ambient("bur5"))
    assert [name for name, _ in restriction.dropped] == ["M3"]
    assert [p.name for p in restriction.tiling.pieces] == ["M1", "M2"]
    assert "dropped 10:M3" in restriction.format_drops(_ap09(data_dir, "10"))


def test_ten_and_nine_restrict_to_the_same_tiling(data_dir):
    target = get_ambient("bur5")
    ten = restrict_tiling(_ap09(data_dir, "10"), target).tiling
    nine = restrict_tiling(_ap09(data_dir, "9"), target).tiling
    assert same_tiling(ten, nine)
    row6 = next(t for t in load_table(data_dir / "table1.tiling") if t.name == "6")
    assert same_tiling(nine, row6)


def _pulled_back(tiling, mapping):
    pieces = tuple(
        replace(piece, constraints=pullback(HPolytope.from_constraints(tiling.vars, piece.constraints), mapping).constraints,
                base=tiling.ambient)
        for piece in tiling.pieces
    )
    return replace(tiling, pieces=pieces)


def test_restricted_two_is_disjoint_while_transcribed_row_one_is_not(data_dir):
    target = get_ambient("bur5")
    restriction = restrict_tiling(_ap09(data_dir, "2"), target)
    assert restriction.dropped == ()
    two = restriction.tiling
    hull = with_implicit_equalities(target.polytope)
    assert find_overlaps(hull, two.pieces) == []
    row1 = next(t for t in load_table(data_dir / "table1.tiling") if t.name == "1")
    assert [(i, j) for i, j, _ in find_overlaps(hull, row1.pieces)] == [(0, 2)]


@pytest.mark.tables
@pytest.mark.parametrize("symmetry", [None, "cyclic", "cremona"])
def test_restricted_two_matches_no_image_of_row_one(data_dir, symmetry):
    target = get_ambient("bur5")
    two = restrict_tiling(_ap09(data_dir, "2"), target).tiling
    image = two if symmetry is None else _pulled_back(two, symmetry_map(symmetry))
    row1 = next(t for t in load_table(data_dir / "table1.tiling") if t.name == "1")
    assert not same_tiling(image, row1)


def _interior_points(ambient, rng: random.Random, count: int) -> list[dict[str, Fraction]]:
    """Rational points near a1 = b1 = c1 = 3/10 and 7/20 elsewhere, kept only when strictly inside."""
    first, *rest = ambient.vars
    points = []
    while len(points) < count:
        point = {name: (Fraction(3, 10) if name[1] == "1" else Fraction(7, 20)) + Fraction(rng.randint(-6, 6), 100) for name in rest}
        point[first] = 3 - sum(point.values())
        if all(c.is_satisfied_by(point) for c in ambient.equalities) and all(c.slack(point) > 0 for c in ambient.inequalities):
            points.append(point)
    return points


@pytest.mark.parametrize("name", ["9", "10"])
def test_restriction_keeps_the_cover_at_interior_points(data_dir, name):
    original = _ap09(data_dir, name)
    target = get_ambient("bur5")
    restricted = restrict_tiling(original, target).tiling
    for point in _interior_points(target.polytope, random.Random(5), 40):
        kept = sum(1 for p in restricted.pieces if p.polytope.contains_point(point))
        assert kept == sum(1 for p in original.pieces if p.polytope.contains_point(point))
        assert kept >= 1
