from fractions import Fraction
import random

import pytest

from lib.errors import ParseError, UnboundedError
from lib.exact.containment import check_containment
from lib.exact.lp import LpStatus, lp_feasible, maximize
from lib.exact.polytope import HPolytope, LinearForm
from lib.exact.textformat import format_polytope, parse_constraint, parse_polytope
from lib.exact.vertices import (
    affine_dim,
    enumerate_vertices,
    implicit_equalities,
    is_full_dimensional,
    relint_meets,
    relint_point,
    remove_redundant,
)
from lib.exact.volume import normalized_volume
from lib.matroid import hypersimplex

X = LinearForm.variable


def cube(d: int) -> HPolytope:
    names = [f"x{i}" for i in range(1, d + 1)]
    constraints = [c for n in names for c in (X(n).ge(0), X(n).le(1))]
    return HPolytope.from_constraints(names, constraints)


def simplex(d: int, scale: int = 1) -> HPolytope:
    names = [f"x{i}" for i in range(1, d + 1)]
    constraints = [X(n).ge(0) for n in names] + [LinearForm.total(names).le(scale)]
    return HPolytope.from_constraints(names, constraints)


# ------ Ground truths ------ #
def test_small_hypersimplex_volume():
    delta = hypersimplex(2, 4)
    assert affine_dim(delta) == 3
    assert len(enumerate_vertices(delta)) == 6
    assert normalized_volume(delta) == 4


def test_unit_square_and_cube():
    assert normalized_volume(cube(2)) == 2
    assert normalized_volume(cube(3)) == 6
    assert len(enumerate_vertices(cube(3))) == 8


@pytest.mark.slow
def test_hypersimplex_3_9():
    delta = hypersimplex(3, 9)
    assert affine_dim(delta) == 8
    assert len(enumerate_vertices(delta)) == 84
    assert normalized_volume(delta) == 4293


def test_both_pulling_orders_agree():
    delta = hypersimplex(2, 5)
    assert normalized_volume(delta, "lex") == normalized_volume(delta, "reverse")


def test_volume_is_measured_inside_declared_equalities():
    diagonal = cube(2).with_constraints([X("x1").eq(X("x2"))])
    assert affine_dim(diagonal) == 1
    assert normalized_volume(diagonal) == 1


def test_lower_dimensional_polytope_has_zero_volume():
    squeezed = cube(2).with_constraints([X("x1").le(X("x2")), X("x1").ge(X("x2"))])
    assert affine_dim(squeezed) == 1
    assert normalized_volume(squeezed) == 0


def test_unbounded_polytope_is_rejected():
    ray = HPolytope.from_constraints(["x1"], [X("x1").ge(0)])
    with pytest.raises(UnboundedError):
        enumerate_vertices(ray)


# ------ LP ------ #
def test_infeasible_system_carries_certificate():
    empty = cube(2).with_constraints([(X("x1") + X("x2")).ge(3)])
    verdict = lp_feasible(empty)
    assert not verdict
    assert verdict.certificate is not None
    assert "combined bound" in verdict.certificate.describe(empty)


def test_maximize_returns_exact_optimum():
    optimum = maximize(hypersimplex(2, 4), X("x1") + X("x2") * Fraction(1, 3))
    assert optimum.status is LpStatus.OPTIMAL
    assert optimum.value == Fraction(4, 3)


def test_maximize_unbounded():
    ray = HPolytope.from_constraints(["x1"], [X("x1").ge(0)])
    assert maximize(ray, X("x1")).status is LpStatus.UNBOUNDED


def test_implicit_equalities_and_relint():
    segment = cube(2).with_constraints([(X("x1") + X("x2")).le(0)])
    assert affine_dim(segment) == 0
    assert not is_full_dimensional(segment)
    assert len(implicit_equalities(segment)) >= 2
    inner = relint_point(cube(2)).point
    assert all(0 < v < 1 for v in inner.values())


def test_relint_meets_rejects_boundary_contact():
    corner = cube(2).with_constraints([(X("x1") + X("x2")).ge(2)])
    assert not relint_meets(corner, cube(2))
    assert relint_meets(cube(2).with_constraints([X("x1").le(Fraction(1, 2))]), cube(2))


def test_remove_redundant_keeps_point_set():
    polytope = cube(2).with_constraints([(X("x1") + X("x2")).le(5), X("x1").le(1)])
    reduced = remove_redundant(polytope)
    assert len(reduced.inequalities) == 4
    assert check_containment(reduced, polytope) and check_containment(polytope, reduced)


def test_containment_witness_violates():
    result = check_containment(cube(2), cube(2).with_constraints([X("x1").le(Fraction(1, 2))]))
    assert not result
    assert result.witness["x1"] > Fraction(1, 2)


# ------ Text format ------ #
def test_parse_polytope_with_let_and_compact_names():
    text = """
    vars a0 a1 a2
    let s = a0 + a1 - 1
    a0a1 <= 3/2      # compact
    s >= 0
    a0 a1 a2 = 2
    """
    polytope = parse_polytope(text)
    assert polytope.vars == ("a0", "a1", "a2")
    assert len(polytope.equalities) == 1
    assert lp_feasible(polytope)


def test_parse_error_location():
    with pytest.raises(ParseError) as info:
        parse_polytope("vars x y\nx + z <= 1\n", "p.txt")
    assert info.value.line == 2
    assert str(info.value).startswith("p.txt:2:")


def test_parse_rejects_zero_denominator():
    with pytest.raises(ParseError):
        parse_constraint("x <= 1/0", ["x"])


def test_serialization_is_canonical():
    polytope = parse_polytope("vars x y\n2x + 4y <= 6\n1/2 x >= 0\n")
    text = format_polytope(polytope)
    assert "x + 2 y <= 3" in text
    assert format_polytope(parse_polytope(text)) == text


# ------ Randomized oracles ------ #
def _random_form(rng: random.Random, d: int) -> LinearForm:
    """Integer form with a nonzero x1 coefficient."""
    form = X("x1") * rng.choice([-2, -1, 1, 2])
    return sum((X(f"x{i}") * rng.randint(-2, 2) for i in range(2, d + 1)), form)


def _random_polytope(rng: random.Random, d: int) -> HPolytope:
    # above dimension 3 a dilated simplex keeps the face lattice small
    polytope = cube(d) if d <= 3 else simplex(d, 2)
    cuts = []
    for _ in range(rng.randint(1, 3)):
        form = _random_form(rng, d)
        cuts.append(form.le(Fraction(rng.randint(-2, 4), rng.randint(1, 3))))
    return polytope.with_constraints(cuts)


@pytest.mark.slow
@pytest.mark.parametrize("seed", [20240917, 20240918, 20240919, 20240920, 20240921])
def test_lp_agrees_with_vertex_enumeration_and_volume_is_additive(seed):
    rng = random.Random(seed)
    for _ in range(100):
        d = rng.randint(1, 5)
        polytope = _random_polytope(rng, d)
        assert bool(lp_feasible(polytope)) == bool(len(enumerate_vertices(polytope)))
        form = _random_form(rng, d)
        rhs = Fraction(rng.randint(0, 3), 2)
        lower = polytope.with_constraints([form.le(rhs)])
        upper = polytope.with_constraints([form.ge(rhs)])
        assert normalized_volume(lower) + normalized_volume(upper) == normalized_volume(polytope)


@pytest.mark.slow
def test_scaling_a_constraint_changes_nothing():
    rng = random.Random(31)
    for _ in range(60):
        d = rng.randint(1, 4)
        polytope = _random_polytope(rng, d)
        rows = list(polytope.inequalities)
        k = rng.randrange(len(rows))
        rows[k] = rows[k].scaled(Fraction(rng.randint(1, 7), rng.randint(1, 5)))
        scaled = HPolytope(polytope.vars, polytope.equalities, tuple(rows))
        assert bool(lp_feasible(scaled)) == bool(lp_feasible(polytope))
        assert affine_dim(scaled) == affine_dim(polytope)
        assert normalized_volume(scaled) == normalized_volume(polytope)
