from fractions import Fraction

import pytest

from lib.errors import ParseError
from lib.snc import adjoint_degree, adjoint_report, check_triple_point_formula, load_fiber, parse_fiber

HALF = Fraction(1, 2)


@pytest.fixture
def case1(data_dir):
    return load_fiber(data_dir / "fibers" / "case1_k2_5.fiber")


def test_case1_triple_points(case1):
    checks = check_triple_point_formula(case1)
    assert len(checks) == 3
    assert all(c.ok for c in checks)
    assert checks[0].format() == "double Y1:A0 Y2:A0: -1 + 0 + 1 = 0 ok"


def test_case1_adjoint_class(case1):
    lattice = case1.component("Y1").lattice
    adjoint = lattice.K + case1.restriction("Y1") + case1.double_locus("Y1")
    assert adjoint == lattice.cls(1, HALF, HALF, 0, HALF)


def test_case1_adjoint_degrees(case1):
    degrees = {name: value for _, name, value in adjoint_report(case1)}
    assert {name for name, value in degrees.items() if value == 0} == {"A1", "C0", "C1", "C3"}
    assert {name for name, value in degrees.items() if value == HALF} == {"A0", "A3", "B0", "B1", "B3", "E"}


def test_adjoint_degree_overrides(case1):
    lattice = case1.component("Y1").lattice
    line = case1.class_of("Y1", "A1")
    assert adjoint_degree(case1, "Y1", line, lattice.zero(), lattice.zero()) == lattice.K.dot(line) == -1


def test_small_fibers(data_dir):
    quadrics = load_fiber(data_dir / "fibers" / "f0_f0.fiber")
    assert [c.format() for c in check_triple_point_formula(quadrics)] == ["double Y1:F Y2:F: 0 + 0 + 0 = 0 ok"]
    plane = load_fiber(data_dir / "fibers" / "p2_f1.fiber")
    assert all(c.ok for c in check_triple_point_formula(plane))
    assert adjoint_report(plane) == [("Y1", "L", -HALF)]


def test_violation_is_reported():
    fiber = parse_fiber("component Y1 P2\nclass L = 1\ncomponent Y2 P2\nclass L = 1\ndouble Y1:L Y2:L p3=0\n")
    (check,) = check_triple_point_formula(fiber)
    assert not check.ok
    assert check.format().endswith("= 2 VIOLATION")


def test_explicit_component_reference():
    fiber = parse_fiber("component Y1 F0\ncomponent Y2 F0\nclass Y1:S = 1 0\nclass S = 1 0\n")
    assert set(fiber.component("Y1").classes) == {"S"}
    assert set(fiber.component("Y2").classes) == {"S"}


@pytest.mark.parametrize(
    ("text", "line"),
    [
        ("class L = 1\n", 1),
        ("component Y1 P3\n", 1),
        ("component Y1 P2\ncomponent Y1 P2\n", 2),
        ("component Y1 P2\nclass L = 1 0\n", 2),
        ("component Y1 P2\nclass L = 1\ndouble Y1:L Y1:L p3=0\n", 3),
        ("component Y1 P2\nclass L = 1\ncomponent Y2 P2\ndouble Y1:L Y2:M p3=0\n", 4),
        ("component Y1 P2\nclass L = 1\ndivisor Y1 = L + 1\n", 3),
        ("component Y1 P2\nclass L = 1\ndivisor Y1 = M\n", 3),
        ("component Y1 P2\ncurve Y1 L\n", 2),
        ("component Y1 P2\nglue Y1\n", 2),
    ],
)
def test_parse_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse_fiber(text, "bad.fiber")
    assert info.value.line == line
