from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from lib.errors import InputError
from lib.exact.lp import LpStatus, maximize
from lib.exact.polytope import Constraint, HPolytope, LinearForm, Relation


@dataclass(frozen=True)
class Containment:
    """P ⊆ Q, or a point of P violating `violated` (a constraint of Q)."""

    contained: bool
    witness: dict[str, Fraction] | None = None
    violated: Constraint | None = None

    def __bool__(self) -> bool:
        return self.contained


def check_containment(inner: HPolytope, outer: HPolytope) -> Containment:
    """Every constraint of `outer` is implied on `inner` (one maximization per constraint side)."""
    if tuple(inner.vars) != tuple(outer.vars):
        raise InputError(f"variable mismatch: {' '.join(inner.vars)} vs {' '.join(outer.vars)}")
    for constraint in outer.constraints:
        sides = [constraint]
        if constraint.relation is Relation.EQ:
            sides = [Constraint(constraint.coeffs, constraint.rhs), Constraint(constraint.coeffs, constraint.rhs).negated()]
        for side in sides:
            optimum = maximize(inner, LinearForm(side.coeffs))
            if optimum.status is LpStatus.INFEASIBLE:
                return Containment(True)
            if optimum.status is LpStatus.UNBOUNDED:
                return _unbounded_witness(inner, side, constraint)
            if optimum.value > side.rhs:
                return Containment(False, optimum.point, constraint)
    return Containment(True)


def _unbounded_witness(inner: HPolytope, side: Constraint, original: Constraint) -> Containment:
    capped = inner.with_constraints([LinearForm(side.coeffs).le(side.rhs + 1)])
    optimum = maximize(capped, LinearForm(side.coeffs))
    return Containment(False, optimum.point, original)
