"""
Arithmetic on SNC central fibers Σ0 = ∪ Y_i.

    component Y1 Bl4P2
    class A0 = 1; 0 1 1 0          # on the most recent component
    class Y1:B3 = 0; 0 -1 0 0      # or addressed explicitly
    component Y3 F0
    class S = 1 0
    double Y1:B3 Y3:S p3=1
    divisor Y1 = 1/2 A1 + C3
    curve Y1 A1

`double` rows glue two classes on distinct components and record the number of
triple points on the curve; `divisor` gives the restriction D|_{Y_i}; `curve`
rows name the classes whose adjoint degree is reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
import re

from lib.errors import InputError, ParseError
from lib.exact.linalg import format_rational
from lib.exact.textformat import Location, parse_expression, strip_comment, tokenize
from lib.surface_lattice import DivClass, SurfaceLattice, intersect_classes, surface_lattice
from lib.utils.logger import get_logger

logger = get_logger()

CLASS_NAME = r"[A-Za-z_][A-Za-z0-9_]*"


@dataclass
class Component:
    name: str
    surface: str
    lattice: SurfaceLattice
    classes: dict[str, DivClass] = field(default_factory=dict)


@dataclass(frozen=True)
class DoubleCurve:
    first: tuple[str, str]  # (component, class)
    second: tuple[str, str]
    p3: int

    def label(self) -> str:
        return f"{':'.join(self.first)} {':'.join(self.second)}"


@dataclass
class SncFiber:
    components: dict[str, Component] = field(default_factory=dict)
    double_curves: list[DoubleCurve] = field(default_factory=list)
    divisors: dict[str, DivClass] = field(default_factory=dict)
    curves: list[tuple[str, str]] = field(default_factory=list)

    def component(self, name: str) -> Component:
        if name not in self.components:
            raise InputError(f"unknown component '{name}'")
        return self.components[name]

    def class_of(self, component: str, name: str) -> DivClass:
        classes = self.component(component).classes
        if name not in classes:
            raise InputError(f"component {component} has no class '{name}'")
        return classes[name]

    def restriction(self, component: str) -> DivClass:
        lattice = self.component(component).lattice
        return self.divisors.get(component, lattice.zero())

    def double_locus(self, component: str) -> DivClass:
        """Sum of the double curves lying on the component."""
        total = self.component(component).lattice.zero()
        for curve in self.double_curves:
            for comp, name in (curve.first, curve.second):
                if comp == component:
                    total = total + self.class_of(comp, name)
        return total


# ------ Parsing ------ #
def _split_reference(text: str, where: Location) -> tuple[str, str]:
    match = re.fullmatch(rf"({CLASS_NAME}):({CLASS_NAME})", text)
    if match is None:
        raise where.error(f"expected <component>:<class>, got '{text}'")
    return match.group(1), match.group(2)


def _parse_divisor(fiber: SncFiber, component: str, text: str, where: Location) -> DivClass:
    classes = fiber.component(component).classes
    names = tuple(classes)
    form = parse_expression(tokenize(text, where), names, {}, where)
    if form.constant != 0:
        raise where.error("divisor has a constant term")
    total = fiber.component(component).lattice.zero()
    for name, coefficient in form.coeffs.items():
        total = total + classes[name] * coefficient
    return total


def parse_fiber(text: str, path: str | Path | None = None) -> SncFiber:
    fiber = SncFiber()
    current: str | None = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = strip_comment(raw)
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        where = Location(path, number, indent + 1)
        keyword, _, rest = body.partition(" ")
        rest = rest.strip()
        try:
            if keyword == "component":
                words = rest.split()
                if len(words) != 2 or not re.fullmatch(CLASS_NAME, words[0]):
                    raise where.error("expected 'component <name> P2|F0|F1|Bl<k>P2'")
                if words[0] in fiber.components:
                    raise where.error(f"duplicate component '{words[0]}'")
                fiber.components[words[0]] = Component(words[0], words[1], surface_lattice(words[1]))
                current = words[0]
            elif keyword == "class":
                name, sep, value = rest.partition("=")
                name = name.strip()
                if not sep:
                    raise where.error("expected 'class [<component>:]<name> = <coordinates>'")
                if ":" in name:
                    owner, name = _split_reference(name, where)
                elif current is None:
                    raise where.error("'class' before any 'component'")
                else:
                    owner = current
                if not re.fullmatch(CLASS_NAME, name):
                    raise where.error(f"invalid class name '{name}'")
                component = fiber.component(owner)
                if name in component.classes:
                    raise where.error(f"duplicate class '{owner}:{name}'")
                component.classes[name] = component.lattice.parse(value)
            elif keyword == "double":
                match = re.fullmatch(r"(\S+)\s+(\S+)\s+p3\s*=\s*(\d+)", rest)
                if match is None:
                    raise where.error("expected 'double <comp>:<class> <comp>:<class> p3=<n>'")
                first = _split_reference(match.group(1), where)
                second = _split_reference(match.group(2), where)
                if first[0] == second[0]:
                    raise where.error(f"double curve glues component {first[0]} to itself")
                fiber.class_of(*first)
                fiber.class_of(*second)
                fiber.double_curves.append(DoubleCurve(first, second, int(match.group(3))))
            elif keyword == "divisor":
                owner, sep, value = rest.partition("=")
                owner = owner.strip()
                if not sep:
                    raise where.error("expected 'divisor <component> = <combination of classes>'")
                if owner in fiber.divisors:
                    raise where.error(f"duplicate divisor on '{owner}'")
                fiber.divisors[owner] = _parse_divisor(fiber, owner, value, where)
            elif keyword == "curve":
                words = rest.split()
                if len(words) != 2:
                    raise where.error("expected 'curve <component> <class>'")
                fiber.class_of(words[0], words[1])
                fiber.curves.append((words[0], words[1]))
            else:
                raise where.error(f"unknown keyword '{keyword}'")
        except ParseError:
            raise
        except InputError as exc:
            raise where.error(str(exc)) from exc
    return fiber


def load_fiber(path: str | Path) -> SncFiber:
    return parse_fiber(Path(path).read_text(encoding="utf-8"), path)


# ------ Checks ------ #
@dataclass(frozen=True)
class TriplePointCheck:
    curve: DoubleCurve
    self_intersections: tuple[Fraction, Fraction]

    @property
    def total(self) -> Fraction:
        return sum(self.self_intersections, Fraction(self.curve.p3))

    @property
    def ok(self) -> bool:
        return self.total == 0

    def format(self) -> str:
        first, second = (format_rational(v) for v in self.self_intersections)
        verdict = "ok" if self.ok else "VIOLATION"
        return f"double {self.curve.label()}: {first} + {second} + {self.curve.p3} = {format_rational(self.total)} {verdict}"


def check_triple_point_formula(fiber: SncFiber) -> list[TriplePointCheck]:
    """(C|_{Y_i})^2 + (C|_{Y_j})^2 + p3 = 0 for every double curve."""
    checks = []
    for curve in fiber.double_curves:
        first = fiber.class_of(*curve.first)
        second = fiber.class_of(*curve.second)
        check = TriplePointCheck(curve, (intersect_classes(first, first), intersect_classes(second, second)))
        if not check.ok:
            logger.info(f"triple point formula fails on [red]{curve.label()}[/red]")
        checks.append(check)
    return checks


def adjoint_degree(fiber: SncFiber, component: str, curve: DivClass, restriction: DivClass | None = None,
                   double_locus: DivClass | None = None) -> Fraction:
    """(K_{Y_i} + D|_{Y_i} + double locus) . C; the fiber's own data fills in what is not given."""
    lattice = fiber.component(component).lattice
    restriction = fiber.restriction(component) if restriction is None else restriction
    double_locus = fiber.double_locus(component) if double_locus is None else double_locus
    return intersect_classes(lattice.K + restriction + double_locus, curve)


def adjoint_report(fiber: SncFiber) -> list[tuple[str, str, Fraction]]:
    return [(comp, name, adjoint_degree(fiber, comp, fiber.class_of(comp, name))) for comp, name in fiber.curves]
