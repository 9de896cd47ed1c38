"""
Exact linear programming over the rationals.

Dense simplex tableau with Bland's rule (guaranteed termination), two phases
with artificial variables only where the right-hand side is negative. Free
variables are split as t = u - w. Every verdict carries either a witness point
or dual multipliers, so callers can re-validate results without trusting the
solver.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from lib.compat import StrEnum
from fractions import Fraction

from lib.exact.linalg import dot, format_rational
from lib.exact.polytope import Constraint, HPolytope, LinearForm
from lib.exact.textformat import format_constraint
from lib.utils.logger import get_logger

logger = get_logger()

ZERO = Fraction(0)
ONE = Fraction(1)


class LpStatus(StrEnum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpSolution:
    """Outcome of `maximize objective . t  s.t.  rows . t <= rhs` with t free."""

    status: LpStatus
    value: Fraction | None = None
    point: tuple[Fraction, ...] | None = None
    # OPTIMAL: optimal dual multipliers. INFEASIBLE: Farkas multipliers y >= 0 with y.rows = 0, y.rhs < 0.
    duals: tuple[Fraction, ...] | None = None


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], basis: list[int]) -> None:
        self.rows = rows
        self.basis = basis
        self.z: list[Fraction] = []
        self.pivots = 0

    @property
    def width(self) -> int:
        return len(self.rows[0]) - 1 if self.rows else 0

    def set_objective(self, costs: Sequence[Fraction]) -> None:
        """Reduced-cost row z_j = c_B B^-1 A_j - c_j; last entry holds the objective value."""
        z = [-c for c in costs] + [ZERO]
        for row, b in zip(self.rows, self.basis, strict=True):
            cb = costs[b]
            if cb:
                z = [zj + cb * a for zj, a in zip(z, row, strict=True)]
        self.z = z

    def pivot(self, r: int, j: int) -> None:
        pivot_row = self.rows[r]
        piv = pivot_row[j]
        pivot_row = [a / piv for a in pivot_row]
        self.rows[r] = pivot_row
        for i, row in enumerate(self.rows):
            if i != r and row[j]:
                f = row[j]
                self.rows[i] = [a - f * p for a, p in zip(row, pivot_row, strict=True)]
        if self.z[j]:
            f = self.z[j]
            self.z = [a - f * p for a, p in zip(self.z, pivot_row, strict=True)]
        self.basis[r] = j

    def run(self, allowed: int) -> LpStatus:
        """Bland's rule: smallest entering index, ratio ties broken by smallest basic index."""
        while True:
            entering = next((j for j in range(allowed) if self.z[j] < 0), None)
            if entering is None:
                return LpStatus.OPTIMAL
            best: tuple[Fraction, int, int] | None = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    key = (row[-1] / a, self.basis[i], i)
                    if best is None or key < best:
                        best = key
            if best is None:
                return LpStatus.UNBOUNDED
            self.pivot(best[2], entering)
            self.pivots += 1

    def value_of(self, column: int) -> Fraction:
        for row, b in zip(self.rows, self.basis, strict=True):
            if b == column:
                return row[-1]
        return ZERO


def solve_lp(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction], objective: Sequence[Fraction]) -> LpSolution:
    """
    Maximize `objective . t` subject to `rows . t <= rhs`, t free.

    Args:
        rows (Sequence): constraint rows, each of length k = len(objective).
        rhs (Sequence): right-hand sides.
        objective (Sequence): objective vector.
    """
    k = len(objective)
    m = len(rows)
    rhs = [Fraction(h) for h in rhs]
    flipped = [h < 0 for h in rhs]
    n_art = sum(flipped)
    width = 2 * k + m + n_art

    tableau_rows: list[list[Fraction]] = []
    basis: list[int] = []
    art = 2 * k + m
    for i, (g, h) in enumerate(zip(rows, rhs, strict=True)):
        g = [Fraction(v) for v in g]
        row = [ZERO] * (width + 1)
        sign = -1 if flipped[i] else 1
        for j, v in enumerate(g):
            row[j] = sign * v
            row[k + j] = -sign * v
        row[2 * k + i] = Fraction(sign)
        row[-1] = sign * h
        if flipped[i]:
            row[art] = ONE
            basis.append(art)
            art += 1
        else:
            basis.append(2 * k + i)
        tableau_rows.append(row)

    tableau = _Tableau(tableau_rows, basis)
    slack = range(2 * k, 2 * k + m)

    if n_art:
        tableau.set_objective([ZERO] * (2 * k + m) + [-ONE] * n_art)
        tableau.run(width)
        if tableau.z[-1] < 0:
            duals = tuple(tableau.z[j] for j in slack)
            return LpSolution(LpStatus.INFEASIBLE, duals=duals)
        # drive remaining (zero-level) artificials out of the basis
        for r, b in enumerate(tableau.basis):
            if b >= 2 * k + m:
                # the slack block has full row rank, so a pivot exists
                j = next(j for j in range(2 * k + m) if tableau.rows[r][j] != 0)
                tableau.pivot(r, j)
        tableau.rows = [row[: 2 * k + m] + [row[-1]] for row in tableau.rows]

    objective = [Fraction(v) for v in objective]
    costs = objective + [-v for v in objective] + [ZERO] * m
    tableau.set_objective(costs)
    status = tableau.run(2 * k + m)
    logger.debug(f"simplex: {m} rows, {k} variables, {tableau.pivots} pivots, {status}")
    if status is LpStatus.UNBOUNDED:
        return LpSolution(LpStatus.UNBOUNDED)

    point = tuple(tableau.value_of(j) - tableau.value_of(k + j) for j in range(k))
    duals = tuple(tableau.z[j] for j in slack)
    return LpSolution(LpStatus.OPTIMAL, tableau.z[-1], point, duals)


# ------ Polytope-level queries ------ #
@dataclass(frozen=True)
class FarkasCertificate:
    """
    Nonnegative multipliers over a polytope's inequalities proving that no point
    satisfies them with the strict ones strict: the combination of reduced rows
    vanishes and the combined right-hand side is negative, or zero while some
    strict row carries positive weight.
    """

    multipliers: Mapping[int, Fraction]
    bound: Fraction

    def describe(self, polytope: HPolytope) -> str:
        parts = [
            f"{format_rational(y)} * ({format_constraint(polytope.inequalities[i], polytope.vars)})"
            for i, y in sorted(self.multipliers.items())
        ]
        return f"{' + '.join(parts) or '0'}; reduced rows cancel, combined bound {format_rational(self.bound)}"


@dataclass(frozen=True)
class Feasibility:
    point: dict[str, Fraction] | None = None
    certificate: FarkasCertificate | None = None

    @property
    def feasible(self) -> bool:
        return self.point is not None

    def __bool__(self) -> bool:
        return self.feasible


def lp_feasible(polytope: HPolytope, strict_set: Iterable[int] = ()) -> Feasibility:
    """
    Decide whether some point satisfies every constraint of `polytope`, with the
    inequalities indexed by `strict_set` satisfied strictly.

    Strictness is decided by maximizing a common slack tau on the strict rows
    (capped at 1): the system is strictly feasible iff the optimum is positive.
    """
    strict = frozenset(strict_set)
    if any(i < 0 or i >= len(polytope.inequalities) for i in strict):
        raise IndexError(f"strict index out of range: {sorted(strict)}")
    system = polytope.reduced
    if system.infeasible:
        return Feasibility()
    for index, h in zip(system.constant_rows, system.constant_slack, strict=True):
        if index in strict and h == 0:
            return Feasibility(certificate=FarkasCertificate({index: ONE}, ZERO))

    k = system.frame.dim
    strict_rows = [pos for pos, src in enumerate(system.source) if src in strict]
    if not strict_rows:
        solution = solve_lp(system.rows, system.rhs, [ZERO] * k)
        t = solution.point
    else:
        marked = set(strict_rows)
        rows = [(*g, ONE if pos in marked else ZERO) for pos, g in enumerate(system.rows)]
        rows.append((*([ZERO] * k), ONE))
        rhs = [*system.rhs, ONE]
        solution = solve_lp(rows, rhs, [ZERO] * k + [ONE])
        t = solution.point[:k] if solution.status is LpStatus.OPTIMAL and solution.value > 0 else None

    if t is None:
        duals = solution.duals[: len(system.rows)] if solution.duals is not None else ()
        multipliers = {system.source[pos]: y for pos, y in enumerate(duals) if y}
        bound = sum((y * system.rhs[pos] for pos, y in enumerate(duals)), ZERO)
        return Feasibility(certificate=FarkasCertificate(multipliers, bound))

    point = polytope.point_dict(system.frame.lift(t))
    if not polytope.contains_point(point) or any(polytope.inequalities[i].slack(point) <= 0 for i in strict):
        raise ArithmeticError("witness failed exact re-validation")
    return Feasibility(point)


@dataclass(frozen=True)
class Optimum:
    status: LpStatus
    value: Fraction | None = None
    point: dict[str, Fraction] | None = None


def maximize(polytope: HPolytope, form: LinearForm) -> Optimum:
    """Maximize an affine functional over a polytope."""
    system = polytope.reduced
    if system.infeasible:
        return Optimum(LpStatus.INFEASIBLE)
    frame = system.frame
    vector = tuple(form.coeffs.get(v, ZERO) for v in polytope.vars)
    objective = tuple(dot(vector, column) for column in frame.basis)
    solution = solve_lp(system.rows, system.rhs, objective)
    if solution.status is not LpStatus.OPTIMAL:
        return Optimum(solution.status)
    point = polytope.point_dict(frame.lift(solution.point))
    return Optimum(LpStatus.OPTIMAL, form.evaluate(point), point)


def constraint_form(constraint: Constraint) -> LinearForm:
    return LinearForm(constraint.coeffs)
