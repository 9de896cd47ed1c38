"""
Line-oriented text formats for linear constraints and polytopes.

Polytope files look like

    vars a0 a1 a2 b0 b1 b2 c0 c1 c2
    let a3 = c0 + c1 + c2 + b0 - 1
    a0 + a2 + b2 <= 1
    a0 a1 a2 b0 b1 b2 c0 c1 c2 = 3

Juxtaposed terms are summed (the `a0 a2 b2 <= 1` abbreviation), rationals are
written `p/q`, `#` starts a comment. Serialization is canonical: variables in
declared order and integer-cleared coprime coefficients.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from pathlib import Path
import re

from lib.errors import InputError, ParseError
from lib.exact.linalg import format_rational
from lib.exact.polytope import Constraint, HPolytope, LinearForm, Relation

# --- Constants ---
TOKEN_PATTERN = re.compile(
    r"\s*(?:(?P<number>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<rel><=|>=|=|≤|≥)|(?P<op>[+\-*]))"
)
RELATIONS = {"<=": "<=", "≤": "<=", ">=": ">=", "≥": ">=", "=": "="}


class Location:
    """Source position used to anchor ParseErrors."""

    def __init__(self, path: str | Path | None = None, line: int = 0, column: int = 1) -> None:
        self.path = path
        self.line = line
        self.column = column

    def error(self, message: str, offset: int = 0) -> ParseError:
        return ParseError(message, self.path, self.line, self.column + offset)


def tokenize(text: str, where: Location) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = TOKEN_PATTERN.match(text, pos)
        if match is None or match.end() == pos:
            offending = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise where.error(f"unexpected character {text[offending]!r}", offending)
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append((kind, match.group(kind), start))
        pos = match.end()
    return tokens


def _split_compact(name: str, known: Sequence[str]) -> list[str] | None:
    """Split `a0a2b2` into known symbols; None when no exact split exists."""
    if name in known:
        return [name]
    for symbol in sorted(known, key=len, reverse=True):
        if name.startswith(symbol):
            rest = _split_compact(name[len(symbol):], known)
            if rest is not None:
                return [symbol, *rest]
    return None


def resolve_symbol(name: str, variables: Sequence[str], aliases: Mapping[str, LinearForm], where: Location,
                   offset: int) -> LinearForm:
    if name in variables:
        return LinearForm.variable(name)
    if name in aliases:
        return aliases[name]
    parts = _split_compact(name, [*variables, *aliases])
    if parts is None:
        raise where.error(f"unknown symbol '{name}'", offset)
    return sum((LinearForm.variable(p) if p in variables else aliases[p] for p in parts), LinearForm())


def parse_expression(tokens: Sequence[tuple[str, str, int]], variables: Sequence[str], aliases: Mapping[str, LinearForm],
                     where: Location) -> LinearForm:
    """Sum of signed terms `[p/q] [*] symbol` or constants; juxtaposition means +."""
    if not tokens:
        raise where.error("empty expression")
    form = LinearForm()
    i = 0
    while i < len(tokens):
        sign = 1
        while i < len(tokens) and tokens[i][0] == "op" and tokens[i][1] in "+-":
            if tokens[i][1] == "-":
                sign = -sign
            i += 1
        if i == len(tokens):
            raise where.error("dangling operator", tokens[-1][2])
        kind, text, offset = tokens[i]
        if kind == "number":
            numerator, _, denominator = text.partition("/")
            if denominator and int(denominator) == 0:
                raise where.error("zero denominator", offset)
            coefficient = Fraction(int(numerator), int(denominator or 1))
            i += 1
            if i < len(tokens) and tokens[i][0] == "op" and tokens[i][1] == "*":
                i += 1
                if i == len(tokens) or tokens[i][0] != "name":
                    raise where.error("expected a symbol after '*'", tokens[i - 1][2])
            if i < len(tokens) and tokens[i][0] == "name":
                form = form + resolve_symbol(tokens[i][1], variables, aliases, where, tokens[i][2]) * (sign * coefficient)
                i += 1
            else:
                form = form + sign * coefficient
        elif kind == "name":
            form = form + resolve_symbol(text, variables, aliases, where, offset) * sign
            i += 1
        else:
            raise where.error(f"unexpected '{text}'", offset)
    return form


def parse_constraint(text: str, variables: Sequence[str], aliases: Mapping[str, LinearForm] | None = None,
                     where: Location | None = None) -> Constraint:
    """Parse `lhs <rel> rhs` with rel one of <=, >=, =."""
    where = where or Location()
    aliases = aliases or {}
    tokens = tokenize(text, where)
    relations = [i for i, tok in enumerate(tokens) if tok[0] == "rel"]
    if len(relations) != 1:
        raise where.error("expected exactly one relation (<=, >= or =)", tokens[relations[1]][2] if relations else 0)
    r = relations[0]
    lhs = parse_expression(tokens[:r], variables, aliases, where)
    rhs = parse_expression(tokens[r + 1:], variables, aliases, where)
    relation = RELATIONS[tokens[r][1]]
    try:
        if relation == "<=":
            return lhs.le(rhs)
        if relation == ">=":
            return lhs.ge(rhs)
        return lhs.eq(rhs)
    except InputError as exc:
        raise where.error(str(exc), tokens[r][2]) from exc


# ------ Canonical serialization ------ #
def _integer_cleared(constraint: Constraint, variables: Sequence[str]) -> tuple[list[int], int]:
    values = [*constraint.vector(variables), constraint.rhs]
    scale = lcm(*(v.denominator for v in values))
    ints = [int(v * scale) for v in values]
    divisor = reduce(gcd, ints, 0) or 1
    ints = [v // divisor for v in ints]
    if constraint.relation is Relation.EQ:
        first = next((v for v in ints[:-1] if v), 0)
        if first < 0:
            ints = [-v for v in ints]
    return ints[:-1], ints[-1]


def format_constraint(constraint: Constraint, variables: Sequence[str]) -> str:
    coefficients, rhs = _integer_cleared(constraint, variables)
    terms = []
    for name, c in zip(variables, coefficients, strict=True):
        if c == 0:
            continue
        magnitude = "" if abs(c) == 1 else f"{abs(c)} "
        if not terms:
            terms.append(f"{'-' if c < 0 else ''}{magnitude}{name}")
        else:
            terms.append(f"{'-' if c < 0 else '+'} {magnitude}{name}")
    lhs = " ".join(terms) or "0"
    return f"{lhs} {constraint.relation.value} {rhs}"


def format_polytope(polytope: HPolytope) -> str:
    lines = [f"vars {' '.join(polytope.vars)}"]
    lines += [format_constraint(c, polytope.vars) for c in polytope.constraints]
    return "\n".join(lines) + "\n"


def format_point(point: Mapping[str, Fraction], variables: Sequence[str]) -> str:
    return "(" + ",".join(format_rational(point[v]) for v in variables) + ")"


# ------ Polytope files ------ #
def strip_comment(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def parse_polytope(text: str, path: str | Path | None = None) -> HPolytope:
    variables: list[str] | None = None
    aliases: dict[str, LinearForm] = {}
    constraints: list[Constraint] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = strip_comment(raw)
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        where = Location(path, number, indent + 1)
        keyword = body.split()[0]
        if keyword == "vars":
            if variables is not None:
                raise where.error("duplicate 'vars' header")
            variables = body.split()[1:]
            if not variables:
                raise where.error("'vars' header lists no variables")
            bad = [v for v in variables if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v)]
            if bad or len(set(variables)) != len(variables):
                raise where.error(f"invalid or duplicate variable names: {' '.join(bad) or ' '.join(variables)}")
            continue
        if variables is None:
            raise where.error("missing 'vars' header before the first constraint")
        if keyword == "let":
            match = re.fullmatch(r"let\s+([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.+)", body)
            if match is None:
                raise where.error("expected 'let <name> = <expression>'")
            name = match.group(1)
            if name in variables or name in aliases:
                raise where.error(f"'{name}' is already defined")
            offset = match.start(2)
            expr_where = Location(path, number, indent + 1 + offset)
            aliases[name] = parse_expression(tokenize(match.group(2), expr_where), variables, aliases, expr_where)
            continue
        constraints.append(parse_constraint(body, variables, aliases, where))
    if variables is None:
        raise ParseError("missing 'vars' header", path, 0, 0)
    return HPolytope.from_constraints(variables, constraints)


def load_polytope(path: str | Path) -> HPolytope:
    return parse_polytope(Path(path).read_text(encoding="utf-8"), path)
