"""
Hypersimplices, b-cuts and matroid base polytopes of weighted line arrangements.

Arrangement files:

    rank 3
    line A0 1 0 0
    line A1 0 1 -1
    concurrent A1 B1 C1     # combinatorial mode (rank 3 only)
    weight * 1/2
    weight A0 1
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from pathlib import Path
import re

from lib.errors import InputError, ParseError
from lib.exact.linalg import matrix_rank
from lib.exact.lp import LpStatus, maximize
from lib.exact.polytope import Constraint, HPolytope, LinearForm
from lib.exact.textformat import Location, strip_comment
from lib.utils.logger import get_logger

logger = get_logger()

NAME_PATTERN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


# ------ Hypersimplex and cuts ------ #
def hypersimplex(r: int, n: int, names: Sequence[str] | None = None) -> HPolytope:
    """Δ(r, n) = {0 <= x_i <= 1, sum x_i = r} in variables x1..xn (or `names`)."""
    if not 1 <= r < n:
        raise InputError(f"hypersimplex needs 1 <= r < n, got r={r}, n={n}")
    names = tuple(names) if names is not None else tuple(f"x{i}" for i in range(1, n + 1))
    if len(names) != n:
        raise InputError(f"expected {n} variable names, got {len(names)}")
    constraints: list[Constraint] = []
    for name in names:
        constraints.append(LinearForm.variable(name).ge(0))
        constraints.append(LinearForm.variable(name).le(1))
    constraints.append(LinearForm.total(names).eq(r))
    return HPolytope.from_constraints(names, constraints)


@dataclass(frozen=True)
class Weight:
    b: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "b", tuple(Fraction(v) for v in self.b))
        bad = [v for v in self.b if not 0 < v <= 1]
        if bad:
            raise InputError(f"weights must lie in (0, 1], got {', '.join(str(v) for v in bad)}")

    @classmethod
    def uniform(cls, n: int, value: Fraction | int = Fraction(1, 2)) -> Weight:
        return cls((Fraction(value),) * n)

    def __len__(self) -> int:
        return len(self.b)

    @property
    def total(self) -> Fraction:
        return sum(self.b, Fraction(0))


def b_cut(delta: HPolytope, weight: Weight) -> HPolytope:
    """{x in Δ : x_i <= b_i}."""
    if len(weight) != delta.n:
        raise InputError(f"weight has {len(weight)} entries, polytope has {delta.n} variables")
    return delta.with_constraints(LinearForm.variable(v).le(b) for v, b in zip(delta.vars, weight.b, strict=True))


def face_at_point(delta_b: HPolytope, incidence: Iterable[int], weight: Weight) -> HPolytope:
    """The face of Δ_b where x_i = b_i for every line i through the point."""
    indices = sorted(set(incidence))
    if any(i < 0 or i >= delta_b.n for i in indices):
        raise InputError(f"incidence indices out of range: {indices}")
    return delta_b.with_constraints(LinearForm.variable(delta_b.vars[i]).eq(weight.b[i]) for i in indices)


# ------ Arrangements ------ #
@dataclass(frozen=True)
class ArrangementSpec:
    """
    n labelled hyperplanes in P^{r-1} with a weight.

    Either `forms` (realizable mode: homogeneous coefficients per line) or
    `concurrencies` (combinatorial mode, r = 3: sets of lines through a common
    point) determines the rank function.
    """

    r: int
    names: tuple[str, ...]
    weight: Weight
    forms: tuple[tuple[Fraction, ...], ...] | None = None
    concurrencies: tuple[frozenset[int], ...] = ()
    _ranks: dict[frozenset[int], int] = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "names", tuple(self.names))
        n = len(self.names)
        if len(set(self.names)) != n:
            raise InputError("duplicate line names")
        if n < self.r:
            raise InputError(f"an arrangement in P^{self.r - 1} needs at least {self.r} lines, got {n}")
        if len(self.weight) != n:
            raise InputError(f"weight has {len(self.weight)} entries for {n} lines")
        if self.forms is not None:
            forms = tuple(tuple(Fraction(c) for c in form) for form in self.forms)
            object.__setattr__(self, "forms", forms)
            for name, form in zip(self.names, forms, strict=True):
                if len(form) != self.r:
                    raise InputError(f"line {name}: expected {self.r} coefficients, got {len(form)}")
                if not any(form):
                    raise InputError(f"line {name}: zero form")
            if self.concurrencies:
                raise InputError("give either coordinates or concurrencies, not both")
        else:
            if self.r != 3:
                raise InputError("combinatorial arrangements are only supported in P^2")
            object.__setattr__(self, "concurrencies", _merge_concurrencies(self.concurrencies))

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def combinatorial(self) -> bool:
        return self.forms is None

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InputError(f"unknown line '{name}'")

    def rank(self, subset: Iterable[int]) -> int:
        """Codimension of the intersection of the given hyperplanes; r for an empty intersection."""
        key = frozenset(subset)
        if key not in self._ranks:
            self._ranks[key] = self._compute_rank(key)
        return self._ranks[key]

    def _compute_rank(self, subset: frozenset[int]) -> int:
        if not subset:
            return 0
        if self.forms is not None:
            return matrix_rank([self.forms[i] for i in sorted(subset)])
        if len(subset) == 1:
            return 1
        if len(subset) == 2 or any(subset <= c for c in self.concurrencies):
            return 2
        return 3

    def closure(self, subset: Iterable[int]) -> frozenset[int]:
        subset = frozenset(subset)
        base = self.rank(subset)
        return frozenset(i for i in range(self.n) if i in subset or self.rank(subset | {i}) == base)

    @cached_property
    def flats(self) -> tuple[tuple[frozenset[int], int], ...]:
        """Nonempty proper flats (nonempty intersections) with their ranks, sorted by rank then members."""
        found: dict[frozenset[int], int] = {}
        for size in range(1, self.r):
            for subset in combinations(range(self.n), size):
                flat = self.closure(subset)
                rank = self.rank(flat)
                if rank < self.r:
                    found[flat] = rank
        return tuple(sorted(found.items(), key=lambda item: (item[1], sorted(item[0]))))

    def multiple_points(self) -> list[frozenset[int]]:
        """Flats of codimension r - 1 through at least two lines (points of P^2 where lines meet)."""
        return [flat for flat, rank in self.flats if rank == self.r - 1 and len(flat) >= 2]

    def label(self, subset: Iterable[int]) -> str:
        return "{" + ",".join(self.names[i] for i in sorted(subset)) + "}"


def _merge_concurrencies(sets: Iterable[frozenset[int]]) -> tuple[frozenset[int], ...]:
    """Points sharing two lines are the same point."""
    merged: list[set[int]] = [set(s) for s in sets if len(s) >= 3]
    changed = True
    while changed:
        changed = False
        for i, j in combinations(range(len(merged)), 2):
            if len(merged[i] & merged[j]) >= 2:
                merged[i] |= merged.pop(j)
                changed = True
                break
    return tuple(sorted((frozenset(s) for s in merged), key=sorted))


# ------ Matroid polytopes ------ #
def matroid_polytope(r: int, names: Sequence[str], constraints: Iterable[Constraint]) -> HPolytope:
    """Δ(r, n) cut by an explicit inequality list."""
    return hypersimplex(r, len(names), names).with_constraints(constraints)


def matroid_polytope_from_arrangement(arrangement: ArrangementSpec) -> HPolytope:
    """BP = {x in Δ(r, n) : sum_{i in F} x_i <= rank(F) for every dependent flat F}, irredundant."""
    delta = hypersimplex(arrangement.r, arrangement.n, arrangement.names)
    cuts = [
        LinearForm.total(arrangement.names[i] for i in sorted(flat)).le(rank)
        for flat, rank in arrangement.flats
        if rank < min(len(flat), arrangement.r)
    ]
    kept = list(cuts)
    index = 0
    while index < len(kept):
        others = delta.with_constraints(kept[:index] + kept[index + 1:])
        optimum = maximize(others, LinearForm(kept[index].coeffs))
        if optimum.status is LpStatus.OPTIMAL and optimum.value <= kept[index].rhs:
            kept.pop(index)
        else:
            index += 1
    logger.debug(f"matroid polytope: {len(cuts)} flat constraints, {len(kept)} irredundant")
    return delta.with_constraints(kept)


# ------ Arrangement files ------ #
def parse_arrangement(text: str, path: str | Path | None = None) -> ArrangementSpec:
    r = 3
    names: list[str] = []
    forms: list[tuple[Fraction, ...]] = []
    concurrent: list[tuple[list[str], Location]] = []
    weights: dict[str, Fraction] = {}
    default: Fraction | None = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = strip_comment(raw)
        if not line.strip():
            continue
        where = Location(path, number, len(line) - len(line.lstrip()) + 1)
        keyword, *args = line.split()
        if keyword == "rank":
            if names or len(args) != 1 or not args[0].isdigit():
                raise where.error("'rank <r>' must come first and hold one integer")
            r = int(args[0])
        elif keyword == "line":
            if not args or not NAME_PATTERN.fullmatch(args[0]):
                raise where.error("expected 'line <name> <coefficients>'")
            if args[0] in names:
                raise where.error(f"duplicate line '{args[0]}'")
            names.append(args[0])
            forms.append(tuple(_rational(a, where) for a in args[1:]))
        elif keyword == "concurrent":
            if len(args) < 2:
                raise where.error("'concurrent' needs at least two line names")
            concurrent.append((args, where))
        elif keyword == "weight":
            if len(args) != 2:
                raise where.error("expected 'weight <name|*> p/q'")
            value = _rational(args[1], where)
            if args[0] == "*":
                default = value
            else:
                weights[args[0]] = value
        else:
            raise where.error(f"unknown keyword '{keyword}'")

    unknown = sorted(set(weights) - set(names))
    if unknown:
        raise ParseError(f"weight for unknown line(s) {', '.join(unknown)}", path, 0, 0)
    missing = [n for n in names if n not in weights and default is None]
    if missing:
        raise ParseError(f"no weight for line(s) {', '.join(missing)}", path, 0, 0)
    weight = Weight(tuple(weights.get(n, default) for n in names))

    sets = []
    for members, where in concurrent:
        bad = [m for m in members if m not in names]
        if bad:
            raise where.error(f"unknown line(s) {', '.join(bad)}")
        sets.append(frozenset(names.index(m) for m in members))
    has_coords = any(forms)
    if has_coords and sets:
        raise ParseError("mixing coordinates and 'concurrent' rows is not supported", path, 0, 0)
    try:
        if has_coords:
            return ArrangementSpec(r, tuple(names), weight, forms=tuple(forms))
        return ArrangementSpec(r, tuple(names), weight, concurrencies=tuple(sets))
    except InputError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), path, 0, 0) from exc


def load_arrangement(path: str | Path) -> ArrangementSpec:
    return parse_arrangement(Path(path).read_text(encoding="utf-8"), path)


def _rational(text: str, where: Location) -> Fraction:
    match = re.fullmatch(r"(-?\d+)(?:/(\d+))?", text)
    if match is None or (match.group(2) is not None and int(match.group(2)) == 0):
        raise where.error(f"expected a rational p/q, got '{text}'")
    return Fraction(int(match.group(1)), int(match.group(2) or 1))


def arrangement_from_points(names: Sequence[str], concurrencies: Iterable[Sequence[str]],
                            weights: Mapping[str, Fraction] | Fraction = Fraction(1, 2)) -> ArrangementSpec:
    """Combinatorial P^2 arrangement from named lines and lists of concurrent names."""
    names = tuple(names)
    sets = tuple(frozenset(names.index(m) for m in group) for group in concurrencies)
    if isinstance(weights, Mapping):
        weight = Weight(tuple(weights[n] for n in names))
    else:
        weight = Weight.uniform(len(names), weights)
    return ArrangementSpec(3, names, weight, concurrencies=sets)
