from fractions import Fraction
import random

import pytest

from lib.errors import HypothesisError, InputError
from lib.exact.lp import LpStatus, lp_feasible, maximize
from lib.exact.polytope import LinearForm
from lib.lc_stability import is_lc, is_lc_at, is_stable, lc_at_point_via_polytope
from lib.matroid import (
    arrangement_from_points,
    b_cut,
    face_at_point,
    hypersimplex,
    load_arrangement,
    matroid_polytope_from_arrangement,
)

NINE = ["A0", "A1", "A2", "B0", "B1", "B2", "C0", "C1", "C2"]


def test_five_concurrent_half_lines_are_not_lc(data_dir):
    arrangement = load_arrangement(data_dir / "arrangements" / "five_concurrent.arr")
    verdict = is_lc(arrangement, arrangement.weight.b)
    assert not verdict
    assert verdict.format(arrangement) == "NOT-LC I={L1,L2,L3,L4,L5} sum=5/2 codim=2"


def test_four_concurrent_half_lines_are_lc():
    arrangement = arrangement_from_points(NINE, [["A0", "A1", "A2", "C0"]])
    assert is_lc(arrangement, arrangement.weight.b).format(arrangement) == "LC"
    assert is_stable(arrangement)


def test_weights_are_validated():
    arrangement = arrangement_from_points(NINE[:4], [])
    with pytest.raises(InputError):
        is_lc(arrangement, [Fraction(1, 2)] * 3)
    with pytest.raises(InputError):
        is_lc(arrangement, [Fraction(2)] * 4)


def test_triple_point_agrees_with_polytope():
    arrangement = arrangement_from_points(NINE, [["A1", "B1", "C1"]])
    polytope = matroid_polytope_from_arrangement(arrangement)
    point = frozenset(arrangement.index(n) for n in ("A1", "B1", "C1"))
    assert is_lc_at(arrangement, arrangement.weight.b, point)
    assert lc_at_point_via_polytope(arrangement, polytope, point)


def test_hypothesis_sum_of_weights():
    arrangement = arrangement_from_points(NINE[:5], [])
    polytope = matroid_polytope_from_arrangement(arrangement)
    with pytest.raises(HypothesisError, match="theorem hypothesis violated"):
        lc_at_point_via_polytope(arrangement, polytope, [0, 1])


def _random_arrangement(rng: random.Random):
    groups = []
    for _ in range(rng.randint(1, 2)):
        groups.append(rng.sample(NINE, rng.randint(3, 5)))
    return arrangement_from_points(NINE, groups)


def test_direct_and_polytope_criteria_agree_on_a_corpus():
    rng = random.Random(7)
    compared = 0
    for _ in range(24):
        arrangement = _random_arrangement(rng)
        polytope = matroid_polytope_from_arrangement(arrangement)
        for point in arrangement.multiple_points():
            try:
                via = lc_at_point_via_polytope(arrangement, polytope, point)
            except HypothesisError:
                continue
            assert via == is_lc_at(arrangement, arrangement.weight.b, point), arrangement.label(point)
            compared += 1
    assert compared >= 20


def test_lowering_weights_keeps_lc():
    rng = random.Random(13)
    checked = 0
    for _ in range(40):
        arrangement = _random_arrangement(rng)
        x = [rng.choice([Fraction(1, 6), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)]) for _ in NINE]
        if not is_lc(arrangement, x):
            continue
        lower = [v * Fraction(rng.randint(0, 4), 4) for v in x]
        assert is_lc(arrangement, lower)
        checked += 1
    assert checked >= 5


@pytest.mark.slow
def test_face_points_inside_the_matroid_polytope_are_lc_points():
    rng = random.Random(17)
    inside = not_lc = 0
    for _ in range(12):
        arrangement = _random_arrangement(rng)
        polytope = matroid_polytope_from_arrangement(arrangement)
        weight = arrangement.weight
        delta_b = b_cut(hypersimplex(arrangement.r, arrangement.n, arrangement.names), weight)
        for point in arrangement.multiple_points():
            face = face_at_point(delta_b, point, weight)
            lc = is_lc_at(arrangement, weight.b, point)
            samples = []
            for _ in range(3):
                objective = sum((LinearForm.variable(v) * rng.randint(-3, 3) for v in face.vars), LinearForm())
                optimum = maximize(face, objective)
                if optimum.status is LpStatus.OPTIMAL:
                    samples.append(optimum.point)
            common = lp_feasible(polytope.intersect(face))
            if common:
                samples.append(common.point)
            for sample in samples:
                if polytope.contains_point(sample):
                    assert lc, arrangement.label(point)
                    inside += 1
            if not lc:
                assert not common
                not_lc += 1
    assert inside > 0 and not_lc > 0
