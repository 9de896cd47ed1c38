"""
Burniat configurations and the polytopes Δ_Bur^d inside Δ_½(3, 9).

A configuration lists the blown-up points of P^2 (the triangle vertices PA, PB,
PC and the extra points) and, for each of the nine lines A0..C2, the blown-up
points it passes through. Everything else is derived: the exceptional
functional of a point P is  sum_{L through P} L - 1  in the line weights.

    triangle PA PB PC
    points P
    line A0 PB PC
    line A1 PB P
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import cache, cached_property
from pathlib import Path

from config import DIRECTORY_CONFIGURATIONS
from lib.errors import InputError, ParseError
from lib.exact.containment import Containment, check_containment
from lib.exact.polytope import Constraint, HPolytope, LinearForm, Relation
from lib.exact.textformat import Location, strip_comment
from lib.matroid import Weight, b_cut, hypersimplex
from lib.utils.logger import get_logger

logger = get_logger()

# --- Coordinates ---
BURNIAT_VARS = ("a0", "a1", "a2", "b0", "b1", "b2", "c0", "c1", "c2")
LINE_NAMES = tuple(v.upper() for v in BURNIAT_VARS)
HALF = Fraction(1, 2)
TRIANGLE_ALIASES = ("a3", "b3", "c3")

# --- Ambients: CLI name -> (degree, variant, configuration) ---
AMBIENTS = {
    "bur6": (6, None, "d6"),
    "bur5": (5, None, "d5"),
    "bur4-nodal": (4, "nodal", "d4-nodal"),
    "bur4-nonnodal": (4, "non-nodal", "d4-nonnodal"),
    "bur3": (3, None, "d3"),
}
VARIANTS = ("nodal", "non-nodal")


# ------ Configurations ------ #
@dataclass(frozen=True)
class BurniatConfiguration:
    name: str
    triangle: tuple[str, str, str]
    points: tuple[str, ...]
    lines: tuple[tuple[str, frozenset[str]], ...]  # (line name, blown-up points on it), in LINE_NAMES order

    def __post_init__(self) -> None:
        names = [line for line, _ in self.lines]
        if tuple(names) != LINE_NAMES:
            raise InputError(f"configuration {self.name}: expected lines {' '.join(LINE_NAMES)}, got {' '.join(names)}")
        blown_up = set(self.blown_up)
        if len(blown_up) != len(self.blown_up):
            raise InputError(f"configuration {self.name}: duplicate point names")
        for line, through in self.lines:
            unknown = sorted(through - blown_up)
            if unknown:
                raise InputError(f"configuration {self.name}: line {line} passes through unknown point(s) {', '.join(unknown)}")
        for point in self.points:
            if len(self.lines_through(point)) < 2:
                raise InputError(f"configuration {self.name}: extra point {point} lies on fewer than two lines")

    @property
    def blown_up(self) -> tuple[str, ...]:
        """Basis order of the exceptional classes: triangle first, then extra points."""
        return (*self.triangle, *self.points)

    @property
    def k(self) -> int:
        return len(self.blown_up)

    @property
    def degree(self) -> int:
        return 9 - self.k

    def lines_through(self, point: str) -> tuple[str, ...]:
        return tuple(line for line, through in self.lines if point in through)

    def points_on(self, line: str) -> frozenset[str]:
        return dict(self.lines)[line]

    def exceptional_form(self, point: str) -> LinearForm:
        return LinearForm.total(line.lower() for line in self.lines_through(point)) - 1

    @cached_property
    def aliases(self) -> dict[str, LinearForm]:
        """a3, b3, c3 over the triangle vertices; e (one extra point) or e1, e2, ... over the others."""
        aliases = {name: self.exceptional_form(p) for name, p in zip(TRIANGLE_ALIASES, self.triangle, strict=True)}
        if len(self.points) == 1:
            aliases["e"] = self.exceptional_form(self.points[0])
        else:
            for i, point in enumerate(self.points, start=1):
                aliases[f"e{i}"] = self.exceptional_form(point)
        return aliases

    def exceptional_aliases(self) -> list[str]:
        return [name for name in self.aliases if name not in TRIANGLE_ALIASES]


def parse_configuration(text: str, name: str, path: str | Path | None = None) -> BurniatConfiguration:
    triangle: tuple[str, ...] | None = None
    points: tuple[str, ...] = ()
    lines: dict[str, frozenset[str]] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = strip_comment(raw)
        if not line.strip():
            continue
        where = Location(path, number, len(line) - len(line.lstrip()) + 1)
        keyword, *args = line.split()
        if keyword == "triangle":
            if len(args) != 3:
                raise where.error("'triangle' needs exactly three point names")
            triangle = tuple(args)
        elif keyword == "points":
            points = tuple(args)
        elif keyword == "line":
            if not args or args[0] not in LINE_NAMES:
                raise where.error(f"expected 'line <{'|'.join(LINE_NAMES)}> <points>'")
            if args[0] in lines:
                raise where.error(f"duplicate line '{args[0]}'")
            lines[args[0]] = frozenset(args[1:])
        else:
            raise where.error(f"unknown keyword '{keyword}'")
    if triangle is None:
        raise ParseError("missing 'triangle' row", path, 0, 0)
    missing = [line for line in LINE_NAMES if line not in lines]
    if missing:
        raise ParseError(f"missing line(s) {' '.join(missing)}", path, 0, 0)
    try:
        return BurniatConfiguration(name, triangle, points, tuple((line, lines[line]) for line in LINE_NAMES))
    except InputError as exc:
        raise ParseError(str(exc), path, 0, 0) from exc


def load_configuration(path: str | Path) -> BurniatConfiguration:
    path = Path(path)
    return parse_configuration(path.read_text(encoding="utf-8"), path.name.removesuffix(".config"), path)


@cache
def builtin_configuration(name: str) -> BurniatConfiguration:
    path = DIRECTORY_CONFIGURATIONS / f"{name}.config"
    if not path.is_file():
        known = sorted(p.name.removesuffix(".config") for p in DIRECTORY_CONFIGURATIONS.glob("*.config"))
        raise InputError(f"unknown configuration '{name}' (known: {', '.join(known)})")
    return load_configuration(path)


# ------ Polytopes ------ #
def half_cut_hypersimplex() -> HPolytope:
    """Δ_½(3, 9) in the Burniat coordinates."""
    return b_cut(hypersimplex(3, 9, BURNIAT_VARS), Weight.uniform(9, HALF))


def polytope_from_configuration(configuration: BurniatConfiguration) -> HPolytope:
    """Δ_½(3, 9) ∩ {0 <= a3, b3, c3 <= 1/2} ∩ {e_k <= 0 for every extra point}."""
    constraints: list[Constraint] = []
    for name in TRIANGLE_ALIASES:
        form = configuration.aliases[name]
        constraints += [form.ge(0), form.le(HALF)]
    constraints += [configuration.aliases[name].le(0) for name in configuration.exceptional_aliases()]
    return half_cut_hypersimplex().with_constraints(constraints)


def _configuration_name(degree: int, variant: str | None) -> str:
    if degree not in (3, 4, 5, 6):
        raise InputError(f"Burniat degree must be one of 3, 4, 5, 6, got {degree}")
    if degree == 4:
        if variant not in VARIANTS:
            raise InputError(f"degree 4 needs a variant ({' or '.join(VARIANTS)}), got {variant!r}")
        return f"d4-{variant.replace('-', '')}"
    if variant is not None:
        raise InputError(f"variant {variant!r} is only meaningful for degree 4")
    return f"d{degree}"


def burniat_polytope(degree: int, variant: str | None = None, configuration: BurniatConfiguration | None = None) -> HPolytope:
    """Δ_Bur^d; the incidence pattern comes from the shipped configuration unless one is given."""
    name = _configuration_name(degree, variant)
    configuration = configuration or builtin_configuration(name)
    if configuration.degree != degree:
        raise InputError(f"configuration {configuration.name} has K^2 = {configuration.degree}, not {degree}")
    return polytope_from_configuration(configuration)


@dataclass(frozen=True)
class BurniatAmbient:
    name: str
    degree: int
    variant: str | None
    configuration: BurniatConfiguration

    @property
    def vars(self) -> tuple[str, ...]:
        return BURNIAT_VARS

    @cached_property
    def polytope(self) -> HPolytope:
        return polytope_from_configuration(self.configuration)

    @property
    def aliases(self) -> dict[str, LinearForm]:
        return self.configuration.aliases

    @property
    def symmetries(self) -> tuple[str, ...]:
        if self.variant == "nodal":
            return ("swap-bc", "cremona")
        if self.variant == "non-nodal":
            return ("swap-index", "cremona")
        return ("cyclic", "cremona")


@cache
def get_ambient(name: str) -> BurniatAmbient:
    if name not in AMBIENTS:
        raise InputError(f"unknown ambient '{name}' (known: {', '.join(AMBIENTS)})")
    degree, variant, configuration = AMBIENTS[name]
    return BurniatAmbient(name, degree, variant, builtin_configuration(configuration))


# ------ Symmetries ------ #
AffineMap = Mapping[str, LinearForm]


def _relabel(pairs: Mapping[str, str]) -> dict[str, LinearForm]:
    return {target: LinearForm.variable(source) for target, source in pairs.items()}


def symmetry_map(name: str) -> dict[str, LinearForm]:
    """
    Affine maps of the nine coordinates, written as image coordinates in terms
    of the source point: `cyclic` sends the a-weights to the b-slots and so on,
    `cremona` exchanges the triangle sides a0, b0, c0 with the exceptional
    functionals a3, b3, c3.
    """
    if name == "cyclic":
        return _relabel({f"{t}{i}": f"{s}{i}" for s, t in (("a", "b"), ("b", "c"), ("c", "a")) for i in range(3)})
    if name == "cremona":
        aliases = builtin_configuration("d6").aliases
        return {"a0": aliases["a3"], "b0": aliases["b3"], "c0": aliases["c3"]}
    if name == "swap-bc":
        return _relabel({"b1": "b2", "b2": "b1", "c1": "c2", "c2": "c1"})
    if name == "swap-index":
        return _relabel({f"{s}{i}": f"{s}{3 - i}" for s in "abc" for i in (1, 2)})
    raise InputError(f"unknown symmetry '{name}'")


def pullback(polytope: HPolytope, mapping: AffineMap) -> HPolytope:
    """{x : mapping(x) in polytope}."""
    constraints = []
    for c in polytope.constraints:
        form = LinearForm(c.coeffs).substitute(mapping)
        constraints.append(form.eq(c.rhs) if c.relation is Relation.EQ else form.le(c.rhs))
    return HPolytope.from_constraints(polytope.vars, constraints)


def check_symmetry(ambient: BurniatAmbient, name: str) -> Containment:
    """The map sends the ambient into itself; maps of finite order are then bijections of it."""
    return check_containment(ambient.polytope, pullback(ambient.polytope, symmetry_map(name)))
