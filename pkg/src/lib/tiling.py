"""
Tiling tables: named lists of matroid polytopes over a Burniat ambient.

    # Table 1, row 6
    tiling T1-6 ambient=bur5 source=table1:6
    piece M1: a1 a2 b1 b2 c1 c2 <= 2
    piece M2: a0 b0 c0 <= 1

Each piece is Δ(3, 9) cut by its comma-separated inequalities; a3, b3, c3 and
the ambient's exceptional functionals (e, e1, ...) are expanded on parsing.
`partial=yes` marks a tiling quoted only in part: it is checked for relevance
and disjointness, but not for coverage.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
import re
import shlex

from lib.burniat import AMBIENTS, BURNIAT_VARS, BurniatAmbient, get_ambient
from lib.errors import InputError
from lib.exact.lp import Feasibility
from lib.exact.polytope import Constraint, HPolytope, LinearForm
from lib.exact.textformat import Location, format_constraint, parse_constraint, strip_comment
from lib.exact.vertices import relint_meets
from lib.matroid import hypersimplex
from lib.utils.logger import get_logger

logger = get_logger()

NAME_PATTERN = re.compile(r"[A-Za-z0-9_:.\-]+")


@dataclass(frozen=True)
class Piece:
    name: str
    constraints: tuple[Constraint, ...]
    base: HPolytope

    @cached_property
    def polytope(self) -> HPolytope:
        return self.base.with_constraints(self.constraints)


@dataclass(frozen=True)
class TilingSpec:
    name: str
    ambient_name: str
    ambient: HPolytope
    pieces: tuple[Piece, ...]
    source: str = ""
    partial: bool = False
    aliases: dict[str, LinearForm] = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "pieces", tuple(self.pieces))
        names = [p.name for p in self.pieces]
        if len(set(names)) != len(names):
            raise InputError(f"tiling {self.name}: duplicate piece names")
        for piece in self.pieces:
            if tuple(piece.base.vars) != tuple(self.ambient.vars):
                raise InputError(f"tiling {self.name}: piece {piece.name} does not live in the ambient's variables")

    @property
    def vars(self) -> tuple[str, ...]:
        return self.ambient.vars

    def piece(self, name: str) -> Piece:
        for piece in self.pieces:
            if piece.name == name:
                return piece
        raise InputError(f"tiling {self.name} has no piece '{name}'")


def burniat_tiling(name: str, ambient: BurniatAmbient, pieces: Iterable[tuple[str, Sequence[Constraint]]],
                   source: str = "", partial: bool = False) -> TilingSpec:
    base = hypersimplex(3, 9, BURNIAT_VARS)
    return TilingSpec(
        name,
        ambient.name,
        ambient.polytope,
        tuple(Piece(piece_name, tuple(constraints), base) for piece_name, constraints in pieces),
        source,
        partial,
        ambient.aliases,
    )


# ------ Parsing ------ #
def _parse_header(body: str, where: Location, ambient_override: str | None) -> tuple[str, dict[str, str]]:
    try:
        words = shlex.split(body)
    except ValueError as exc:
        raise where.error(f"bad tiling header: {exc}")
    if len(words) < 2 or not NAME_PATTERN.fullmatch(words[1]):
        raise where.error("expected 'tiling <name> [ambient=<name>] [source=<label>] [partial=yes]'")
    options: dict[str, str] = {}
    for word in words[2:]:
        key, sep, value = word.partition("=")
        if not sep or key not in ("ambient", "source", "partial"):
            raise where.error(f"unknown tiling option '{word}'")
        options[key] = value
    if ambient_override is not None:
        options["ambient"] = ambient_override
    if "ambient" not in options:
        raise where.error(f"tiling {words[1]} names no ambient (add ambient=<name> or pass one explicitly)")
    if options.get("partial", "no") not in ("yes", "no"):
        raise where.error("partial must be 'yes' or 'no'")
    return words[1], options


def _parse_piece(body: str, where: Location, ambient: BurniatAmbient) -> tuple[str, list[Constraint]]:
    match = re.fullmatch(r"piece\s+([^:\s]+)\s*:\s*(.*)", body)
    if match is None:
        raise where.error("expected 'piece <name>: <inequality>, <inequality>, ...'")
    name, rest = match.group(1), match.group(2)
    if not NAME_PATTERN.fullmatch(name):
        raise where.error(f"invalid piece name '{name}'")
    constraints = []
    offset = match.start(2)
    for chunk in rest.split(","):
        if chunk.strip():
            lead = len(chunk) - len(chunk.lstrip())
            at = Location(where.path, where.line, where.column + offset + lead)
            constraints.append(parse_constraint(chunk.strip(), BURNIAT_VARS, ambient.aliases, at))
        offset += len(chunk) + 1
    if not constraints:
        raise where.error(f"piece {name} lists no inequalities")
    return name, constraints


def parse_tilings(text: str, path: str | Path | None = None, ambient: str | None = None) -> list[TilingSpec]:
    """All tilings of a file; `ambient` overrides every header's ambient= option."""
    tilings: list[TilingSpec] = []
    header: tuple[str, dict[str, str], BurniatAmbient] | None = None
    pieces: list[tuple[str, list[Constraint]]] = []

    def close() -> None:
        if header is not None:
            name, options, target = header
            tilings.append(burniat_tiling(name, target, pieces, options.get("source", ""), options.get("partial") == "yes"))

    for number, raw in enumerate(text.splitlines(), start=1):
        line = strip_comment(raw)
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        where = Location(path, number, indent + 1)
        keyword = body.split()[0]
        if keyword == "tiling":
            close()
            name, options = _parse_header(body, where, ambient)
            try:
                target = get_ambient(options["ambient"])
            except InputError as exc:
                raise where.error(str(exc))
            if any(t.name == name for t in tilings):
                raise where.error(f"duplicate tiling '{name}'")
            header = (name, options, target)
            pieces = []
        elif keyword == "piece":
            if header is None:
                raise where.error("'piece' before any 'tiling' header")
            piece = _parse_piece(body, where, header[2])
            if any(p[0] == piece[0] for p in pieces):
                raise where.error(f"duplicate piece '{piece[0]}'")
            pieces.append(piece)
        else:
            raise where.error(f"unknown keyword '{keyword}'")
    close()
    return tilings


def load_table(path: str | Path, ambient: str | None = None) -> list[TilingSpec]:
    return parse_tilings(Path(path).read_text(encoding="utf-8"), path, ambient)


def format_tiling(tiling: TilingSpec) -> str:
    header = f"tiling {tiling.name} ambient={tiling.ambient_name}"
    if tiling.source:
        header += f" source={shlex.quote(tiling.source)}"
    if tiling.partial:
        header += " partial=yes"
    lines = [header]
    for piece in tiling.pieces:
        lines.append(f"piece {piece.name}: {', '.join(format_constraint(c, tiling.vars) for c in piece.constraints)}")
    return "\n".join(lines) + "\n"


def format_tilings(tilings: Iterable[TilingSpec]) -> str:
    return "\n".join(format_tiling(t) for t in tilings)


# ------ Restriction ------ #
@dataclass(frozen=True)
class Restriction:
    tiling: TilingSpec
    dropped: tuple[tuple[str, Feasibility], ...]  # piece name, certificate that it misses relint(target)

    def format_drops(self, source: TilingSpec) -> str:
        lines = []
        for name, verdict in self.dropped:
            certificate = verdict.certificate.describe(self.tiling.ambient.intersect(source.piece(name).polytope)) \
                if verdict.certificate is not None else "empty intersection"
            lines.append(f"dropped {self.tiling.name}:{name}: misses relint({self.tiling.ambient_name}); {certificate}")
        return "\n".join(lines)


def restrict_tiling(tiling: TilingSpec, target: BurniatAmbient) -> Restriction:
    """Move the tiling onto a smaller ambient, dropping pieces that miss its relative interior."""
    source_degree = get_ambient(tiling.ambient_name).degree if tiling.ambient_name in AMBIENTS else None
    if source_degree is not None and target.degree > source_degree:
        raise InputError(f"cannot restrict from {tiling.ambient_name} to the larger {target.name}")
    kept: list[Piece] = []
    dropped: list[tuple[str, Feasibility]] = []
    for piece in tiling.pieces:
        verdict = relint_meets(piece.polytope, target.polytope)
        if verdict:
            kept.append(piece)
        else:
            logger.info(f"restrict {tiling.name}: piece [yellow]{piece.name}[/yellow] misses relint({target.name})")
            dropped.append((piece.name, verdict))
    restricted = replace(tiling, ambient_name=target.name, ambient=target.polytope, pieces=tuple(kept), aliases=target.aliases)
    return Restriction(restricted, tuple(dropped))
