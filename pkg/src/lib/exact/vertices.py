from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import sympy

from lib.errors import UnboundedError
from lib.exact.linalg import as_fraction, dot, integer_kernel, particular_solution, primitive_integer_row
from lib.exact.lp import Feasibility, LpStatus, lp_feasible, maximize, solve_lp
from lib.exact.polytope import Constraint, HPolytope, LinearForm, Relation
from lib.utils.logger import get_logger

logger = get_logger()

ZERO = Fraction(0)


# ------ Affine hull and relative interior ------ #
@lru_cache(maxsize=4096)
def implicit_equalities(polytope: HPolytope) -> frozenset[int]:
    """Indices of inequalities that hold with equality on every point of a nonempty polytope."""
    system = polytope.reduced
    if system.infeasible:
        return frozenset(range(len(polytope.inequalities)))
    implicit = {i for i, h in zip(system.constant_rows, system.constant_slack, strict=True) if h == 0}
    candidates = list(range(len(system.rows)))
    if lp_feasible(polytope, (system.source[pos] for pos in candidates)):
        return frozenset(implicit)

    undecided = set(candidates)
    for pos in candidates:
        if pos not in undecided:
            continue
        solution = solve_lp(system.rows, system.rhs, [-v for v in system.rows[pos]])
        if solution.status is LpStatus.INFEASIBLE:
            return frozenset(range(len(polytope.inequalities)))
        if solution.status is LpStatus.OPTIMAL:
            if system.rhs[pos] + solution.value == 0:
                implicit.add(system.source[pos])
                undecided.discard(pos)
            # every row with positive slack at this optimum is not implicit
            for other in list(undecided):
                if dot(system.rows[other], solution.point) < system.rhs[other]:
                    undecided.discard(other)
        else:
            undecided.discard(pos)
    return frozenset(implicit)


def relint_point(polytope: HPolytope) -> Feasibility:
    """A point of the relative interior (all non-implicit inequalities strict), if nonempty."""
    if not lp_feasible(polytope):
        return lp_feasible(polytope)
    implicit = implicit_equalities(polytope)
    strict = [i for i in range(len(polytope.inequalities)) if i not in implicit]
    return lp_feasible(polytope, strict)


def relint_meets(piece: HPolytope, ambient: HPolytope) -> Feasibility:
    """Point in piece ∩ relint(ambient), or a certificate that there is none."""
    combined = ambient.intersect(piece)
    if not lp_feasible(ambient):
        return Feasibility()
    implicit = implicit_equalities(ambient)
    strict = [i for i in range(len(ambient.inequalities)) if i not in implicit]
    return lp_feasible(combined, strict)


@lru_cache(maxsize=1024)
def with_implicit_equalities(polytope: HPolytope) -> HPolytope:
    """Same point set, implicit equalities moved to the equality list (a nonempty result is full-dimensional)."""
    if not lp_feasible(polytope):
        return polytope
    implicit = implicit_equalities(polytope)
    if not implicit:
        return polytope
    moved = []
    for i in sorted(implicit):
        c = polytope.inequalities[i]
        if c.coeffs:
            moved.append(Constraint(c.coeffs, c.rhs, Relation.EQ))
    rest = tuple(c for i, c in enumerate(polytope.inequalities) if i not in implicit)
    return HPolytope(polytope.vars, polytope.equalities + tuple(moved), rest)


@lru_cache(maxsize=4096)
def affine_dim(polytope: HPolytope) -> int:
    """-1 for the empty set, else the dimension of the affine hull of the point set."""
    if not lp_feasible(polytope):
        return -1
    system = polytope.reduced
    implicit = implicit_equalities(polytope)
    rows = [g for g, src in zip(system.rows, system.source, strict=True) if src in implicit]
    rank, _ = integer_kernel(rows, system.frame.dim)
    return system.frame.dim - rank


def ambient_dim(polytope: HPolytope) -> int:
    """Dimension of the affine space cut out by the equalities alone."""
    return polytope.frame.dim if polytope.frame.origin is not None else -1


def is_full_dimensional(polytope: HPolytope) -> bool:
    return affine_dim(polytope) == ambient_dim(polytope)


def check_bounded(polytope: HPolytope) -> None:
    """Raise UnboundedError unless every reduced coordinate is bounded on the polytope."""
    system = polytope.reduced
    if system.infeasible:
        return
    k = system.frame.dim
    for j in range(k):
        for sign in (1, -1):
            objective = [Fraction(sign) if i == j else ZERO for i in range(k)]
            if solve_lp(system.rows, system.rhs, objective).status is LpStatus.UNBOUNDED:
                raise UnboundedError("unbounded")


def remove_redundant(polytope: HPolytope) -> HPolytope:
    """Drop duplicate and LP-implied inequalities; the point set is unchanged."""
    kept: list[Constraint] = []
    seen = set()
    for c in polytope.inequalities:
        key = primitive_integer_row([*c.vector(polytope.vars), c.rhs])
        if key not in seen:
            seen.add(key)
            kept.append(c)
    index = 0
    while index < len(kept):
        candidate = kept[index]
        others = HPolytope(polytope.vars, polytope.equalities, tuple(kept[:index] + kept[index + 1:]))
        optimum = maximize(others, LinearForm(candidate.coeffs))
        if optimum.status is LpStatus.INFEASIBLE or (optimum.status is LpStatus.OPTIMAL and optimum.value <= candidate.rhs):
            kept.pop(index)
        else:
            index += 1
    return HPolytope(polytope.vars, polytope.equalities, tuple(kept))


# ------ Double description ------ #
@dataclass(frozen=True)
class VertexSet:
    """Exact vertex list of a bounded polytope, sorted lexicographically."""

    vertices: tuple[tuple[Fraction, ...], ...]
    ambient: HPolytope

    def __len__(self) -> int:
        return len(self.vertices)

    def as_points(self) -> list[dict[str, Fraction]]:
        return [self.ambient.point_dict(v) for v in self.vertices]


@dataclass(frozen=True)
class FullDimensionalRep:
    """
    A nonempty bounded polytope in coordinates s of its own affine hull, where it
    is full-dimensional: irredundant integer rows g . s <= h and exact vertices.
    """

    origin: tuple[Fraction, ...]  # t-space point of s = 0
    basis: tuple[tuple[int, ...], ...]  # t = origin + sum s_j basis[j]
    rows: tuple[tuple[tuple[int, ...], Fraction], ...]
    vertices: tuple[tuple[Fraction, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def to_t(self, s: Sequence[Fraction]) -> tuple[Fraction, ...]:
        t = list(self.origin)
        for coefficient, column in zip(s, self.basis, strict=True):
            for i, value in enumerate(column):
                t[i] += coefficient * value
        return tuple(t)


def _primitive_pair(g: Sequence[Fraction], h: Fraction) -> tuple[tuple[int, ...], Fraction]:
    ints = primitive_integer_row(g)
    j = next(i for i, v in enumerate(g) if v)
    return ints, h * Fraction(ints[j]) / g[j]


def _prune_rows(rows: list[tuple[tuple[int, ...], Fraction]]) -> list[tuple[tuple[int, ...], Fraction]]:
    unique = list(dict.fromkeys(rows))
    index = 0
    while index < len(unique):
        g, h = unique[index]
        others = unique[:index] + unique[index + 1:]
        solution = solve_lp([o[0] for o in others], [o[1] for o in others], g)
        if solution.status is LpStatus.OPTIMAL and solution.value <= h:
            unique.pop(index)
        else:
            index += 1
    return unique


def _independent_rows(rows: Sequence[Sequence[int]], dim: int) -> list[int]:
    chosen: list[int] = []
    for i in range(len(rows)):
        if integer_kernel([rows[j] for j in (*chosen, i)], dim)[0] == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == dim:
                break
    return chosen


def _primitive_ray(vector: Sequence[Fraction | int]) -> tuple[int, ...]:
    return primitive_integer_row([Fraction(v) for v in vector])


def double_description(cone_rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """
    Extreme rays of the pointed cone {y : a . y >= 0 for all rows a}.

    Incremental insertion; two rays are combined only when they are adjacent,
    tested combinatorially (no third ray's zero set contains their common one).
    """
    dim = len(cone_rows[0])
    initial = _independent_rows(cone_rows, dim)
    if len(initial) < dim:
        raise UnboundedError("unbounded")
    inverse = sympy.Matrix([list(cone_rows[i]) for i in initial]).inv()
    rays: list[tuple[tuple[int, ...], int]] = []
    everything = 0
    for i in initial:
        everything |= 1 << i
    for j in range(dim):
        column = [as_fraction(inverse[r, j]) for r in range(dim)]
        rays.append((_primitive_ray(column), everything & ~(1 << initial[j])))

    for index, row in enumerate(cone_rows):
        if index in initial:
            continue
        values = [sum(a * y for a, y in zip(row, ray, strict=True)) for ray, _ in rays]
        plus = [i for i, v in enumerate(values) if v > 0]
        minus = [i for i, v in enumerate(values) if v < 0]
        zero = [i for i, v in enumerate(values) if v == 0]
        bit = 1 << index
        new_rays = [rays[i] for i in plus] + [(rays[i][0], rays[i][1] | bit) for i in zero]
        for p in plus:
            for n in minus:
                common = rays[p][1] & rays[n][1]
                if common.bit_count() < dim - 2:
                    continue
                if any(k not in (p, n) and (rays[k][1] & common) == common for k in range(len(rays))):
                    continue
                vp, vn = values[p], values[n]
                combined = [vp * yn - vn * yp for yp, yn in zip(rays[p][0], rays[n][0], strict=True)]
                new_rays.append((_primitive_ray(combined), common | bit))
        rays = new_rays
        logger.debug(f"double description: row {index}, {len(rays)} rays")
    return [ray for ray, _ in rays]


@lru_cache(maxsize=1024)
def full_dimensional_rep(polytope: HPolytope) -> FullDimensionalRep | None:
    """Vertices and irredundant rows of a polytope inside its own affine hull; None if empty."""
    if not lp_feasible(polytope):
        return None
    check_bounded(polytope)
    system = polytope.reduced
    k = system.frame.dim
    implicit = implicit_equalities(polytope)
    eq_rows = [g for g, src in zip(system.rows, system.source, strict=True) if src in implicit]
    eq_rhs = [h for h, src in zip(system.rhs, system.source, strict=True) if src in implicit]
    origin = particular_solution(eq_rows, eq_rhs, k)
    _, basis = integer_kernel(eq_rows, k)
    d = len(basis)
    if d == 0:
        return FullDimensionalRep(origin, (), (), ((),))

    rows = []
    for g, h, src in zip(system.rows, system.rhs, system.source, strict=True):
        if src in implicit:
            continue
        reduced = [dot(g, column) for column in basis]
        slack = h - dot(g, origin)
        if any(reduced):
            rows.append(_primitive_pair(reduced, slack))
    rows = _prune_rows(rows)

    cone_rows = []
    for g, h in rows:
        scale = h.denominator
        cone_rows.append(primitive_integer_row([*(-Fraction(v) * scale for v in g), h * scale]))
    cone_rows.append(tuple([0] * d + [1]))
    rays = double_description(cone_rows)

    vertices = set()
    for ray in rays:
        if ray[-1] <= 0:
            raise UnboundedError("unbounded")
        vertices.add(tuple(Fraction(v, ray[-1]) for v in ray[:-1]))
    return FullDimensionalRep(origin, tuple(basis), tuple(rows), tuple(sorted(vertices)))


def enumerate_vertices(polytope: HPolytope) -> VertexSet:
    """Exact, deduplicated vertex list; empty iff the polytope is empty. Raises UnboundedError."""
    rep = full_dimensional_rep(polytope)
    if rep is None:
        return VertexSet((), polytope)
    frame = polytope.reduced.frame
    points = sorted({frame.lift(rep.to_t(s)) for s in rep.vertices})
    return VertexSet(tuple(points), polytope)


def tight_mask(rows: Sequence[tuple[tuple[int, ...], Fraction]], vertex: Sequence[Fraction]) -> int:
    mask = 0
    for i, (g, h) in enumerate(rows):
        if dot(g, vertex) == h:
            mask |= 1 << i
    return mask

