"""Log-canonicity and stability of weighted line arrangements, directly and through matroid polytopes."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from lib.errors import HypothesisError, InputError
from lib.exact.linalg import format_rational
from lib.exact.lp import lp_feasible
from lib.exact.polytope import HPolytope
from lib.matroid import ArrangementSpec, b_cut, face_at_point, hypersimplex
from lib.utils.logger import get_logger

logger = get_logger()


@dataclass(frozen=True)
class LcVerdict:
    lc: bool
    flat: frozenset[int] | None = None
    total: Fraction | None = None
    codim: int | None = None

    def __bool__(self) -> bool:
        return self.lc

    def format(self, arrangement: ArrangementSpec) -> str:
        if self.lc:
            return "LC"
        return f"NOT-LC I={arrangement.label(self.flat)} sum={format_rational(self.total)} codim={self.codim}"


def _check_weights(arrangement: ArrangementSpec, x: Sequence[Fraction]) -> tuple[Fraction, ...]:
    x = tuple(Fraction(v) for v in x)
    if len(x) != arrangement.n:
        raise InputError(f"expected {arrangement.n} weights, got {len(x)}")
    if any(not 0 <= v <= 1 for v in x):
        raise InputError("lc test needs weights in [0, 1]")
    return x


def is_lc(arrangement: ArrangementSpec, x: Sequence[Fraction]) -> LcVerdict:
    """
    (P^{r-1}, sum x_i B_i) is lc iff sum_{i in F} x_i <= codim F for every flat F.

    Flats are visited by rank then members, so the reported violation is deterministic.
    """
    x = _check_weights(arrangement, x)
    for flat, rank in arrangement.flats:
        total = sum((x[i] for i in flat), Fraction(0))
        if total > rank:
            return LcVerdict(False, flat, total, rank)
    return LcVerdict(True)


def is_lc_at(arrangement: ArrangementSpec, x: Sequence[Fraction], point: Iterable[int]) -> bool:
    """lc near the point where exactly the given lines meet (its codim-2 flat and the lines through it)."""
    x = _check_weights(arrangement, x)
    point = frozenset(point)
    for flat, rank in arrangement.flats:
        if flat <= point and sum((x[i] for i in flat), Fraction(0)) > rank:
            return False
    return True


def is_stable(arrangement: ArrangementSpec) -> bool:
    return bool(is_lc(arrangement, arrangement.weight.b)) and arrangement.weight.total > arrangement.r


def lc_at_point_via_polytope(arrangement: ArrangementSpec, polytope: HPolytope, incidence: Iterable[int]) -> bool:
    """
    lc at p iff BP ∩ Δ_b^p is nonempty, for BP meeting Δ_b and sum b_i > r.

    Args:
        arrangement (ArrangementSpec): supplies r and the weight b.
        polytope (HPolytope): the matroid polytope BP, in the arrangement's line names.
        incidence (Iterable[int]): indices of the lines through p.
    """
    weight = arrangement.weight
    if weight.total <= arrangement.r:
        raise HypothesisError(f"theorem hypothesis violated: sum of weights {format_rational(weight.total)} <= {arrangement.r}")
    delta_b = b_cut(hypersimplex(arrangement.r, arrangement.n, arrangement.names), weight)
    if not lp_feasible(polytope.intersect(delta_b)):
        raise HypothesisError("theorem hypothesis violated: the matroid polytope misses the b-cut hypersimplex")
    face = face_at_point(delta_b, incidence, weight)
    return lp_feasible(polytope.intersect(face)).feasible
