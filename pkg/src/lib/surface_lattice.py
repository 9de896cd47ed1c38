"""
Intersection theory on blown-up planes and Z/2 x Z/2 covers.

Classes on Bl_k P^2 are written (d; m1, ..., mk) for dH - sum m_i E_i, so the
pairing is dd' - sum m_i m_i' and K = (-3; -1, ..., -1). F0 = P^1 x P^1 uses
the basis (S, F) with S^2 = F^2 = 0, S.F = 1.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from lib.compat import StrEnum
from fractions import Fraction
from functools import cache, cached_property
from math import isqrt
import re

import numpy as np
from sympy.utilities.iterables import multiset_permutations

from config import NEG_CURVE_DEGREE_BOUND, NEG_CURVE_MAX_BLOWUPS, SLOW_SCAN_DEGREE_BOUND
from lib.burniat import BurniatConfiguration, TRIANGLE_ALIASES
from lib.errors import InputError
from lib.exact.linalg import format_rational
from lib.utils.logger import get_logger

logger = get_logger()


# ------ Lattices and classes ------ #
@dataclass(frozen=True)
class SurfaceLattice:
    name: str
    gram: tuple[tuple[int, ...], ...]
    canonical: tuple[int, ...]
    planar: bool = True  # coordinates (d; m1..mk) of a blown-up plane

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.array(self.gram, dtype=object)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def k(self) -> int:
        if not self.planar:
            raise InputError(f"{self.name} is not a blown-up plane")
        return self.rank - 1

    def cls(self, *coords: Fraction | int) -> DivClass:
        return DivClass(self, tuple(Fraction(c) for c in coords))

    def zero(self) -> DivClass:
        return self.cls(*([0] * self.rank))

    @property
    def K(self) -> DivClass:
        return self.cls(*self.canonical)

    def H(self) -> DivClass:
        return self.cls(1, *([0] * self.k))

    def E(self, i: int) -> DivClass:
        """Exceptional class over the i-th blown-up point, 1-based."""
        if not 1 <= i <= self.k:
            raise InputError(f"no exceptional class E{i} on {self.name}")
        m = [0] * self.k
        m[i - 1] = -1
        return self.cls(0, *m)

    def parse(self, text: str) -> DivClass:
        """`d; m1 ... mk` (commas optional, parentheses optional); plain coordinates on F0."""
        body = text.strip().removeprefix("(").removesuffix(")")
        numbers = [t for t in re.split(r"[\s,;]+", body) if t]
        try:
            values = [Fraction(t) for t in numbers]
        except (ValueError, ZeroDivisionError):
            raise InputError(f"bad class '{text}' on {self.name}")
        if len(values) != self.rank:
            raise InputError(f"class '{text}' has {len(values)} coordinates, {self.name} needs {self.rank}")
        return DivClass(self, tuple(values))


@dataclass(frozen=True)
class DivClass:
    lattice: SurfaceLattice
    coords: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.coords) != self.lattice.rank:
            raise InputError(f"{self.lattice.name} classes have {self.lattice.rank} coordinates, got {len(self.coords)}")

    @property
    def k(self) -> int:
        return self.lattice.k

    @property
    def d(self) -> Fraction:
        return self.coords[0]

    @property
    def m(self) -> tuple[Fraction, ...]:
        return self.coords[1:]

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def _check(self, other: DivClass) -> None:
        if other.lattice != self.lattice:
            raise InputError(f"lattice mismatch: {self.lattice.name} vs {other.lattice.name}")

    def __add__(self, other: DivClass) -> DivClass:
        self._check(other)
        return DivClass(self.lattice, tuple(a + b for a, b in zip(self.coords, other.coords, strict=True)))

    def __sub__(self, other: DivClass) -> DivClass:
        return self + (-other)

    def __neg__(self) -> DivClass:
        return DivClass(self.lattice, tuple(-a for a in self.coords))

    def __mul__(self, factor: Fraction | int) -> DivClass:
        return DivClass(self.lattice, tuple(a * Fraction(factor) for a in self.coords))

    __rmul__ = __mul__

    def dot(self, other: DivClass) -> Fraction:
        return intersect_classes(self, other)

    def format(self) -> str:
        parts = [format_rational(c) for c in self.coords]
        if self.lattice.planar:
            return f"({parts[0]};{','.join(parts[1:])})"
        return f"({','.join(parts)})"

    __str__ = format


@cache
def picard_lattice(k: int) -> SurfaceLattice:
    """Pic(Bl_k P^2) with Gram matrix diag(1, -1, ..., -1)."""
    if k < 0:
        raise InputError(f"number of blown-up points must be >= 0, got {k}")
    gram = tuple(tuple(int(i == j) * (1 if i == 0 else -1) for j in range(k + 1)) for i in range(k + 1))
    return SurfaceLattice("P2" if k == 0 else f"Bl{k}P2", gram, (-3, *([-1] * k)))


F0 = SurfaceLattice("F0", ((0, 1), (1, 0)), (-2, -2), planar=False)


def surface_lattice(kind: str) -> SurfaceLattice:
    """P2, F0, F1 (= Bl1P2) or Bl<k>P2."""
    if kind == "P2":
        return picard_lattice(0)
    if kind == "F0":
        return F0
    if kind == "F1":
        return picard_lattice(1)
    match = re.fullmatch(r"Bl(\d+)P2", kind)
    if match is None:
        raise InputError(f"unknown surface '{kind}' (expected P2, F0, F1 or Bl<k>P2)")
    return picard_lattice(int(match.group(1)))


def intersect_classes(x: DivClass, y: DivClass) -> Fraction:
    x._check(y)
    value = np.array(x.coords, dtype=object) @ x.lattice.matrix @ np.array(y.coords, dtype=object)
    return Fraction(value)


# ------ Covers ------ #
@dataclass(frozen=True)
class HurwitzDivisor:
    terms: tuple[tuple[DivClass, Fraction], ...]

    def as_class(self) -> DivClass:
        lattice = self.terms[0][0].lattice
        total = lattice.zero()
        for cls, coefficient in self.terms:
            total = total + cls * coefficient
        return total


def hurwitz_divisor(indices: Iterable[tuple[DivClass, int]]) -> HurwitzDivisor:
    """sum (m_i - 1)/m_i D_i over branch components with ramification indices m_i."""
    terms = []
    for cls, m in indices:
        if m < 1:
            raise InputError(f"ramification index must be >= 1, got {m}")
        terms.append((cls, Fraction(m - 1, m)))
    if not terms:
        raise InputError("empty branch divisor")
    return HurwitzDivisor(tuple(terms))


@dataclass(frozen=True)
class CoverData:
    """Branch data of a Z/2 x Z/2 cover: components of D_a, D_b, D_c with their ramification indices."""

    lattice: SurfaceLattice
    branch: Mapping[str, tuple[DivClass, ...]]  # "a", "b", "c" -> irreducible components
    hurwitz_index: int = 2

    def divisor(self, letter: str) -> DivClass:
        total = self.lattice.zero()
        for cls in self.branch[letter]:
            total = total + cls
        return total

    def hurwitz(self) -> HurwitzDivisor:
        return hurwitz_divisor((cls, self.hurwitz_index) for letter in "abc" for cls in self.branch[letter])


def cover_k_squared(cover: CoverData, cover_degree: int = 4) -> Fraction:
    """K_X^2 = deg(pi) (K + D_Hur)^2 for K_X = pi^*(K + D_Hur)."""
    adjoint = cover.lattice.K + cover.hurwitz().as_class()
    return cover_degree * intersect_classes(adjoint, adjoint)


@dataclass(frozen=True)
class FundamentalRelations:
    ok: bool
    classes: tuple[DivClass, ...] = ()  # L_chi1, L_chi2, L_chi3
    obstruction: str | None = None


def check_fundamental_relations(cover: CoverData) -> FundamentalRelations:
    """2 L_chi1 = D_b + D_c, 2 L_chi2 = D_a + D_c, 2 L_chi3 = D_a + D_b, halved exactly in the lattice."""
    classes = []
    for index, (first, second) in enumerate((("b", "c"), ("a", "c"), ("a", "b")), start=1):
        total = cover.divisor(first) + cover.divisor(second)
        for position, value in enumerate(total.coords):
            if value.denominator != 1 or value.numerator % 2:
                coordinate = "d" if position == 0 and cover.lattice.planar else f"coordinate {position}"
                return FundamentalRelations(False, obstruction=f"D_{first} + D_{second} = {total} is odd in {coordinate} (L_chi{index})")
        classes.append(total * Fraction(1, 2))
    return FundamentalRelations(True, tuple(classes))


def configuration_classes(configuration: BurniatConfiguration) -> dict[str, DivClass]:
    """Classes of the nine lines (strict transforms), A3, B3, C3 and the exceptionals over extra points."""
    lattice = picard_lattice(configuration.k)
    order = configuration.blown_up
    classes: dict[str, DivClass] = {}
    for line, through in configuration.lines:
        cls = lattice.H()
        for point in through:
            cls = cls - lattice.E(order.index(point) + 1)
        classes[line] = cls
    for alias, point in zip(TRIANGLE_ALIASES, configuration.triangle, strict=True):
        classes[alias.upper()] = lattice.E(order.index(point) + 1)
    for point in configuration.points:
        classes[f"E_{point}"] = lattice.E(order.index(point) + 1)
    return classes


def burniat_cover_data(configuration: BurniatConfiguration) -> CoverData:
    """D_a = A0 + A1 + A2 + A3 and cyclically; exceptionals over extra points are not branch."""
    classes = configuration_classes(configuration)
    branch = {letter: tuple(classes[f"{letter.upper()}{i}"] for i in range(4)) for letter in "abc"}
    return CoverData(picard_lattice(configuration.k), branch)


# ------ Negative curves ------ #
def _check_k(k: int) -> None:
    if not 0 <= k <= NEG_CURVE_MAX_BLOWUPS:
        raise InputError(f"negative-curve search supports 0 <= k <= {NEG_CURVE_MAX_BLOWUPS}, got {k}")


def _check_self_int(self_int: int) -> None:
    if self_int not in (-1, -2):
        raise InputError(f"self-intersection must be -1 or -2, got {self_int}")


def enumerate_neg_curves(k: int, self_int: int, degree_bound: int = NEG_CURVE_DEGREE_BOUND) -> list[DivClass]:
    """
    Classes C = (d; m) with d >= 0, C^2 = self_int and C.K = -2 - self_int,
    i.e. sum m_i = 3d - 2 - self_int and sum m_i^2 = d^2 - self_int.
    """
    _check_k(k)
    _check_self_int(self_int)
    lattice = picard_lattice(k)
    found: list[DivClass] = []
    for d in range(degree_bound + 1):
        target_sum = 3 * d - 2 - self_int
        target_square = d * d - self_int
        bound = isqrt(target_square)

        def extend(prefix: list[int], total: int, squares: int) -> None:
            if len(prefix) == k:
                if total == target_sum and squares == target_square:
                    found.append(lattice.cls(d, *prefix))
                return
            left = k - len(prefix) - 1
            for value in range(-bound, bound + 1):
                new_squares = squares + value * value
                if new_squares > target_square:
                    continue
                # the remaining entries can move the sum by at most sqrt(left * budget)
                budget = target_square - new_squares
                if abs(target_sum - total - value) > isqrt(left * budget) + 1:
                    continue
                extend([*prefix, value], total + value, new_squares)

        extend([], 0, 0)
    return sorted(found, key=lambda c: c.coords)


def slow_neg_curve_scan(k: int, self_int: int, degree_bound: int = SLOW_SCAN_DEGREE_BOUND) -> list[DivClass]:
    """Independent exhaustive scan: numpy over non-increasing m-vectors, then all distinct permutations."""
    _check_k(k)
    _check_self_int(self_int)
    lattice = picard_lattice(k)
    found = []
    for d in range(degree_bound + 1):
        target_sum = 3 * d - 2 - self_int
        target_square = d * d - self_int
        bound = isqrt(target_square)
        values = np.arange(bound, -bound - 1, -1, dtype=np.int64)
        if k == 0:
            if target_sum == 0 and target_square == 0:
                found.append(lattice.cls(d))
            continue
        rows = values[:, None]
        for _ in range(k - 1):
            n_rows = rows.shape[0]
            grown = np.concatenate([np.repeat(rows, len(values), axis=0), np.tile(values, n_rows)[:, None]], axis=1)
            keep = (grown[:, -1] <= grown[:, -2]) & ((grown**2).sum(axis=1) <= target_square)
            rows = grown[keep]
        hits = rows[(rows.sum(axis=1) == target_sum) & ((rows**2).sum(axis=1) == target_square)]
        for row in hits:
            for permutation in multiset_permutations([int(v) for v in row]):
                found.append(lattice.cls(d, *permutation))
    return sorted(found, key=lambda c: c.coords)


def effective_neg_two_curves(configuration: BurniatConfiguration) -> list[DivClass]:
    """Strict transforms of configuration lines through at least three blown-up points."""
    classes = configuration_classes(configuration)
    return sorted((classes[line] for line, through in configuration.lines if len(through) >= 3), key=lambda c: c.coords)


# ------ Nef and ample ------ #
class Positivity(StrEnum):
    AMPLE = "AMPLE"
    NEF_NOT_AMPLE = "NEF-NOT-AMPLE"
    NOT_NEF = "NOT-NEF"


@dataclass(frozen=True)
class NefReport:
    kind: Positivity
    classes: tuple[DivClass, ...] = ()  # zero classes, or the negative class
    square: Fraction | None = None

    def format(self) -> str:
        if self.kind is Positivity.AMPLE:
            return "AMPLE"
        label = "zero" if self.kind is Positivity.NEF_NOT_AMPLE else "negative"
        return " ".join([str(self.kind), *(f"{label}={c.format()}" for c in self.classes)])


def nef_test_curves(k: int, effective_neg_two: Sequence[DivClass] = ()) -> list[DivClass]:
    """Irreducible (-1)-classes (nonnegative on every effective (-2)-curve), the (-2)-curves and the fibers H - E_i."""
    lattice = picard_lattice(k)
    minus_one = [c for c in enumerate_neg_curves(k, -1) if all(intersect_classes(c, n) >= 0 for n in effective_neg_two)]
    fibers = [lattice.H() - lattice.E(i) for i in range(1, k + 1)]
    return [*minus_one, *effective_neg_two, *fibers]


def nef_ample_report(k: int, divisor: DivClass, effective_neg_two: Sequence[DivClass] = ()) -> NefReport:
    """Sign of D against the test curves; ample needs every pairing positive and D^2 > 0."""
    _check_k(k)
    if divisor.lattice != picard_lattice(k):
        raise InputError(f"divisor lives on {divisor.lattice.name}, not on Bl{k}P2")
    curves = nef_test_curves(k, effective_neg_two)
    square = intersect_classes(divisor, divisor)
    negative = [c for c in curves if intersect_classes(divisor, c) < 0]
    if negative:
        return NefReport(Positivity.NOT_NEF, (negative[0],), square)
    zero = tuple(c for c in curves if intersect_classes(divisor, c) == 0)
    if zero or square <= 0:
        return NefReport(Positivity.NEF_NOT_AMPLE, zero, square)
    return NefReport(Positivity.AMPLE, (), square)
