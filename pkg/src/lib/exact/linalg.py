from collections.abc import Sequence
from fractions import Fraction
from functools import reduce
from math import gcd, lcm

import sympy


# --- Scalar helpers ---
def as_fraction(value: int | str | Fraction | sympy.Rational) -> Fraction:
    """Coerce ints, `p/q` strings and sympy rationals to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    return Fraction(value)


def format_rational(value: Fraction | int) -> str:
    """Exact `p/q` rendering; integers print without denominator."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def primitive_integer_row(row: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a rational vector by a positive factor to coprime integers."""
    denominators = lcm(*(Fraction(v).denominator for v in row)) if row else 1
    ints = [int(Fraction(v) * denominators) for v in row]
    divisor = reduce(gcd, ints, 0)
    if divisor == 0:
        return tuple(ints)
    return tuple(v // divisor for v in ints)


def dot(u: Sequence[Fraction | int], v: Sequence[Fraction | int]) -> Fraction:
    return sum((Fraction(a) * b for a, b in zip(u, v, strict=True)), Fraction(0))


# ------ Integer lattice kernel ------ #
def integer_kernel(rows: Sequence[Sequence[Fraction | int]], n: int) -> tuple[int, list[tuple[int, ...]]]:
    """
    Rank and lattice basis of {x in Z^n : A x = 0}.

    Column-style Hermite reduction: unimodular column operations bring A to
    lower echelon form; the transform columns beyond the pivots span the
    kernel lattice (saturated, since the transform is unimodular).

    Args:
        rows (Sequence): rows of A, rational entries allowed.
        n (int): number of columns.

    Returns:
        (rank, basis) with len(basis) == n - rank.
    """
    int_rows = [primitive_integer_row(r) for r in rows if any(r)]
    m = len(int_rows)
    a_cols = [[int_rows[i][j] for i in range(m)] for j in range(n)]
    u_cols = [[1 if i == j else 0 for i in range(n)] for j in range(n)]

    pivot = 0
    for r in range(m):
        if pivot == n:
            break
        while True:
            candidates = [c for c in range(pivot, n) if a_cols[c][r] != 0]
            if not candidates:
                break
            best = min(candidates, key=lambda c: abs(a_cols[c][r]))
            a_cols[pivot], a_cols[best] = a_cols[best], a_cols[pivot]
            u_cols[pivot], u_cols[best] = u_cols[best], u_cols[pivot]
            head = a_cols[pivot][r]
            done = True
            for c in range(pivot + 1, n):
                value = a_cols[c][r]
                if value == 0:
                    continue
                q = value // head
                a_cols[c] = [x - q * y for x, y in zip(a_cols[c], a_cols[pivot], strict=True)]
                u_cols[c] = [x - q * y for x, y in zip(u_cols[c], u_cols[pivot], strict=True)]
                if a_cols[c][r] != 0:
                    done = False
            if done:
                break
        if any(a_cols[c][r] != 0 for c in range(pivot, n)):
            pivot += 1

    return pivot, [tuple(u_cols[c]) for c in range(pivot, n)]


def rank(rows: Sequence[Sequence[Fraction | int]], n: int) -> int:
    return integer_kernel(rows, n)[0]


# ------ Rational systems (sympy) ------ #
def particular_solution(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction], n: int) -> tuple[Fraction, ...] | None:
    """One rational solution of A x = b with free parameters set to zero, or None if inconsistent."""
    if not rows:
        return tuple(Fraction(0) for _ in range(n))
    a = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in map(Fraction, row)] for row in rows])
    b = sympy.Matrix([sympy.Rational(Fraction(v).numerator, Fraction(v).denominator) for v in rhs])
    try:
        solution, params = a.gauss_jordan_solve(b)
    except ValueError:
        return None
    solution = solution.subs({p: 0 for p in params})
    return tuple(as_fraction(v) for v in solution)


def matrix_rank(rows: Sequence[Sequence[Fraction | int]]) -> int:
    """Rank of a rational matrix via sympy."""
    if not rows:
        return 0
    return sympy.Matrix([[sympy.Rational(Fraction(v).numerator, Fraction(v).denominator) for v in row] for row in rows]).rank()


def determinant(rows: Sequence[Sequence[Fraction | int]]) -> Fraction:
    """Exact determinant by fraction-free elimination."""
    if not rows:
        return Fraction(1)
    matrix = sympy.Matrix([[sympy.Rational(Fraction(v).numerator, Fraction(v).denominator) for v in row] for row in rows])
    return as_fraction(matrix.det(method="bareiss"))
