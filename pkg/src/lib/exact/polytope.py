from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from lib.compat import StrEnum
from fractions import Fraction
from functools import cached_property

from lib.errors import InputError
from lib.exact.linalg import dot, integer_kernel, particular_solution, primitive_integer_row

Rational = Fraction


class Relation(StrEnum):
    LE = "<="
    EQ = "="


@dataclass(frozen=True)
class Constraint:
    """Linear (in)equality `sum coeffs[v] * v  <relation>  rhs` over named variables."""

    coeffs: Mapping[str, Fraction]
    rhs: Fraction
    relation: Relation = Relation.LE

    def __post_init__(self) -> None:
        cleaned = {name: Fraction(c) for name, c in self.coeffs.items() if Fraction(c) != 0}
        object.__setattr__(self, "coeffs", cleaned)
        object.__setattr__(self, "rhs", Fraction(self.rhs))
        object.__setattr__(self, "relation", Relation(self.relation))
        if not cleaned and self.is_satisfied_by({}):
            raise InputError(f"trivially true constraint 0 {self.relation} {self.rhs}")

    def __hash__(self) -> int:
        return hash((tuple(sorted(self.coeffs.items())), self.rhs, self.relation))

    @classmethod
    def ge(cls, coeffs: Mapping[str, Fraction | int], rhs: Fraction | int) -> Constraint:
        """`coeffs . x >= rhs`, stored as its negated <= form."""
        return cls({name: -Fraction(c) for name, c in coeffs.items()}, -Fraction(rhs), Relation.LE)

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        return sum((c * Fraction(point.get(name, 0)) for name, c in self.coeffs.items()), Fraction(0))

    def slack(self, point: Mapping[str, Fraction]) -> Fraction:
        return self.rhs - self.evaluate(point)

    def is_satisfied_by(self, point: Mapping[str, Fraction]) -> bool:
        s = self.slack(point)
        return s == 0 if self.relation is Relation.EQ else s >= 0

    def vector(self, variables: Sequence[str]) -> tuple[Fraction, ...]:
        return tuple(self.coeffs.get(name, Fraction(0)) for name in variables)

    def scaled(self, factor: Fraction | int) -> Constraint:
        factor = Fraction(factor)
        if factor <= 0:
            raise InputError("constraints can only be scaled by a positive factor")
        return Constraint({n: c * factor for n, c in self.coeffs.items()}, self.rhs * factor, self.relation)

    def negated(self) -> Constraint:
        """Reverse inequality `coeffs . x >= rhs` in <= form."""
        return Constraint({n: -c for n, c in self.coeffs.items()}, -self.rhs, self.relation)


@dataclass(frozen=True)
class LinearForm:
    """Affine functional `sum coeffs[v] * v + constant`, e.g. a3 = c0 + c1 + c2 + b0 - 1."""

    coeffs: Mapping[str, Fraction] = field(default_factory=dict)
    constant: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", {n: Fraction(c) for n, c in self.coeffs.items() if Fraction(c) != 0})
        object.__setattr__(self, "constant", Fraction(self.constant))

    @classmethod
    def variable(cls, name: str) -> LinearForm:
        return cls({name: Fraction(1)})

    @classmethod
    def total(cls, names: Iterable[str]) -> LinearForm:
        form = cls()
        for name in names:
            form = form + cls.variable(name)
        return form

    def __add__(self, other: LinearForm | Fraction | int) -> LinearForm:
        if not isinstance(other, LinearForm):
            return LinearForm(self.coeffs, self.constant + Fraction(other))
        coeffs = dict(self.coeffs)
        for name, c in other.coeffs.items():
            coeffs[name] = coeffs.get(name, Fraction(0)) + c
        return LinearForm(coeffs, self.constant + other.constant)

    __radd__ = __add__

    def __neg__(self) -> LinearForm:
        return LinearForm({n: -c for n, c in self.coeffs.items()}, -self.constant)

    def __sub__(self, other: LinearForm | Fraction | int) -> LinearForm:
        return self + (-other)

    def __mul__(self, factor: Fraction | int) -> LinearForm:
        factor = Fraction(factor)
        return LinearForm({n: c * factor for n, c in self.coeffs.items()}, self.constant * factor)

    __rmul__ = __mul__

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        return self.constant + sum((c * Fraction(point.get(n, 0)) for n, c in self.coeffs.items()), Fraction(0))

    def substitute(self, mapping: Mapping[str, LinearForm]) -> LinearForm:
        """Replace variables by affine forms (pullback along an affine map)."""
        result = LinearForm({}, self.constant)
        for name, c in self.coeffs.items():
            result = result + (mapping[name] * c if name in mapping else LinearForm({name: c}))
        return result

    def le(self, bound: Fraction | int | LinearForm = 0) -> Constraint:
        diff = self - bound
        return Constraint(diff.coeffs, -diff.constant, Relation.LE)

    def ge(self, bound: Fraction | int | LinearForm = 0) -> Constraint:
        diff = self - bound
        return Constraint.ge(diff.coeffs, -diff.constant)

    def eq(self, bound: Fraction | int | LinearForm = 0) -> Constraint:
        diff = self - bound
        return Constraint(diff.coeffs, -diff.constant, Relation.EQ)


# ------ Reduced coordinates ------ #
@dataclass(frozen=True)
class ReducedFrame:
    """
    Parametrisation x = origin + basis^T t of the affine hull of the equalities.

    `basis` is a lattice basis of {x in Z^n : homogeneous equalities vanish}, so
    integer points of t-space are exactly the lattice of the ambient problem.
    `origin` is None when the equalities are inconsistent.
    """

    origin: tuple[Fraction, ...] | None
    basis: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def reduce(self, vector: Sequence[Fraction], rhs: Fraction) -> tuple[tuple[Fraction, ...], Fraction]:
        """Express `vector . x <= rhs` in t-coordinates."""
        assert self.origin is not None
        g = tuple(dot(vector, column) for column in self.basis)
        return g, Fraction(rhs) - dot(vector, self.origin)

    def lift(self, t: Sequence[Fraction]) -> tuple[Fraction, ...]:
        assert self.origin is not None
        point = list(self.origin)
        for coefficient, column in zip(t, self.basis, strict=True):
            if coefficient:
                for i, value in enumerate(column):
                    point[i] += coefficient * value
        return tuple(point)


@dataclass(frozen=True)
class ReducedSystem:
    """Inequalities of a polytope as rows `g . t <= h` in reduced coordinates."""

    frame: ReducedFrame
    rows: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]
    source: tuple[int, ...]  # index into HPolytope.inequalities
    constant_rows: tuple[int, ...]  # inequalities whose reduced row is zero
    constant_slack: tuple[Fraction, ...]  # their rhs on the affine hull, aligned with constant_rows
    infeasible: bool

    @cached_property
    def integer_rows(self) -> tuple[tuple[tuple[int, ...], int], ...]:
        """Rows scaled to primitive integers, rhs carried along (rhs stays rational)."""
        scaled = []
        for g, h in zip(self.rows, self.rhs, strict=True):
            ints = primitive_integer_row(g)
            j = next(i for i, v in enumerate(g) if v)
            scaled.append((ints, h * Fraction(ints[j]) / g[j]))
        return tuple(scaled)


@dataclass(frozen=True)
class HPolytope:
    """
    Polyhedron given by linear equalities and inequalities over named variables.

    Instances are immutable; derived data (reduced frame, implicit equalities)
    is cached per instance.
    """

    vars: tuple[str, ...]
    equalities: tuple[Constraint, ...] = ()
    inequalities: tuple[Constraint, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "equalities", tuple(self.equalities))
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        if len(set(self.vars)) != len(self.vars):
            raise InputError(f"duplicate variable names in {self.vars}")
        known = set(self.vars)
        for constraint in (*self.equalities, *self.inequalities):
            unknown = sorted(set(constraint.coeffs) - known)
            if unknown:
                raise InputError(f"unknown variable(s) {', '.join(unknown)}; declared: {' '.join(self.vars)}")
        if any(c.relation is not Relation.EQ for c in self.equalities):
            raise InputError("equalities must use relation '='")
        if any(c.relation is not Relation.LE for c in self.inequalities):
            raise InputError("inequalities must use relation '<='")

    @classmethod
    def from_constraints(cls, variables: Sequence[str], constraints: Iterable[Constraint]) -> HPolytope:
        constraints = list(constraints)
        return cls(
            tuple(variables),
            tuple(c for c in constraints if c.relation is Relation.EQ),
            tuple(c for c in constraints if c.relation is Relation.LE),
        )

    @property
    def constraints(self) -> tuple[Constraint, ...]:
        return (*self.equalities, *self.inequalities)

    @property
    def n(self) -> int:
        return len(self.vars)

    def with_constraints(self, constraints: Iterable[Constraint]) -> HPolytope:
        return HPolytope.from_constraints(self.vars, [*self.constraints, *constraints])

    def intersect(self, other: HPolytope) -> HPolytope:
        """Concatenated constraint system; point set is self ∩ other."""
        if tuple(other.vars) != tuple(self.vars):
            raise InputError(f"variable mismatch: {' '.join(self.vars)} vs {' '.join(other.vars)}")
        return HPolytope(self.vars, self.equalities + other.equalities, self.inequalities + other.inequalities)

    def contains_point(self, point: Mapping[str, Fraction]) -> bool:
        return all(c.is_satisfied_by(point) for c in self.constraints)

    def point_dict(self, values: Sequence[Fraction]) -> dict[str, Fraction]:
        return dict(zip(self.vars, values, strict=True))

    @cached_property
    def frame(self) -> ReducedFrame:
        rows = [c.vector(self.vars) for c in self.equalities]
        rhs = [c.rhs for c in self.equalities]
        origin = particular_solution(rows, rhs, self.n)
        _, basis = integer_kernel(rows, self.n)
        return ReducedFrame(origin, tuple(basis))

    @cached_property
    def reduced(self) -> ReducedSystem:
        frame = self.frame
        if frame.origin is None:
            return ReducedSystem(frame, (), (), (), (), (), True)
        rows, rhs, source, constant, constant_slack = [], [], [], [], []
        infeasible = False
        for index, constraint in enumerate(self.inequalities):
            g, h = frame.reduce(constraint.vector(self.vars), constraint.rhs)
            if any(g):
                rows.append(g)
                rhs.append(h)
                source.append(index)
            else:
                constant.append(index)
                constant_slack.append(h)
                infeasible = infeasible or h < 0
        return ReducedSystem(frame, tuple(rows), tuple(rhs), tuple(source), tuple(constant), tuple(constant_slack), infeasible)
