"""
Verification of matroid tilings of a b-cut ambient.

Coverage is certified by exact volume accounting: the pieces tile the ambient
iff no two of them overlap in a full-dimensional set and their normalized
volumes add up to the ambient's. A volume deficit is turned into a concrete
uncovered point by a depth-first set-difference split; in dimension <= 4 the
verdict is cross-checked against the chambers of the facet arrangement.
"""

from __future__ import annotations

from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from lib.compat import StrEnum
from fractions import Fraction
from itertools import combinations
from pathlib import Path

import networkx as nx
import polars as pl

from config import CHAMBER_ORACLE_MAX_DIM, MAX_WORKERS
from lib.errors import InputError
from lib.exact.containment import check_containment
from lib.exact.linalg import format_rational, primitive_integer_row
from lib.exact.lp import FarkasCertificate, LpStatus, maximize
from lib.exact.polytope import Constraint, HPolytope, LinearForm
from lib.exact.textformat import format_point
from lib.exact.vertices import affine_dim, relint_meets, relint_point, with_implicit_equalities
from lib.exact.volume import normalized_volume
from lib.tiling import Piece, TilingSpec
from lib.utils.logger import get_logger

logger = get_logger()

# --- Report schema ---
REPORT_SCHEMA = {
    "tiling": pl.String,
    "ambient": pl.String,
    "kind": pl.String,  # piece | total | ambient | verdict | subset | oracle
    "name": pl.String,
    "volume": pl.String,
    "relevant": pl.Boolean,
    "detail": pl.String,
}


class VerdictKind(StrEnum):
    VALID = "VALID"
    GAP = "GAP"
    OVERLAP = "OVERLAP"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    point: dict[str, Fraction] | None = None
    pair: tuple[str, str] | None = None

    def format(self, variables: Sequence[str]) -> str:
        if self.kind is VerdictKind.VALID:
            return "VALID"
        if self.kind is VerdictKind.GAP:
            return f"GAP {format_point(self.point, variables)}"
        return f"OVERLAP {self.pair[0]} {self.pair[1]} {format_point(self.point, variables)}"


# ------ Relevance ------ #
@dataclass(frozen=True)
class PieceRelevance:
    name: str
    relevant: bool
    witness: dict[str, Fraction] | None = None
    certificate: FarkasCertificate | None = None


def check_piece_relevance(tiling: TilingSpec) -> list[PieceRelevance]:
    """A point of piece ∩ relint(ambient) per piece, or an exact verdict that there is none."""
    results = []
    for piece in tiling.pieces:
        verdict = relint_meets(piece.polytope, tiling.ambient)
        results.append(PieceRelevance(piece.name, verdict.feasible, verdict.point, verdict.certificate))
        if not verdict:
            logger.info(f"{tiling.name}: piece [yellow]{piece.name}[/yellow] misses relint({tiling.ambient_name})")
    return results


# ------ Volumes, overlaps, gaps ------ #
def _piece_volume(task: tuple[HPolytope, tuple[Constraint, ...]]) -> Fraction:
    ambient, constraints = task
    combined = ambient.with_constraints(constraints)
    if affine_dim(combined) < affine_dim(ambient):
        return Fraction(0)
    return normalized_volume(combined)


def piece_volumes(ambient: HPolytope, pieces: Sequence[Piece], workers: int = MAX_WORKERS) -> list[Fraction]:
    """normalized_volume(piece ∩ ambient) per piece, in piece order."""
    tasks = [(ambient, piece.constraints) for piece in pieces]
    if workers <= 1 or len(tasks) <= 1:
        return [_piece_volume(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(_piece_volume, tasks))


def find_overlaps(ambient: HPolytope, pieces: Sequence[Piece]) -> list[tuple[int, int, dict[str, Fraction]]]:
    """Pairs whose intersection inside the ambient is full-dimensional, with a relative-interior point."""
    overlaps = []
    dim = affine_dim(ambient)
    for i, j in combinations(range(len(pieces)), 2):
        common = ambient.with_constraints([*pieces[i].constraints, *pieces[j].constraints])
        if affine_dim(common) == dim:
            overlaps.append((i, j, relint_point(common).point))
    return overlaps


def _binding_constraints(ambient: HPolytope, piece: Piece) -> list[Constraint]:
    """The piece's inequalities not already implied on the ambient."""
    binding = []
    for c in HPolytope.from_constraints(ambient.vars, piece.constraints).inequalities:
        optimum = maximize(ambient, LinearForm(c.coeffs))
        if optimum.status is not LpStatus.OPTIMAL or optimum.value > c.rhs:
            binding.append(c)
    return binding


def find_gap(ambient: HPolytope, pieces: Sequence[Piece]) -> dict[str, Fraction] | None:
    """
    A relative-interior point of a full-dimensional region of ambient \\ ∪ pieces, or None.

    The cell minus a piece {c_1 <= h_1, ..., c_m <= h_m} is the union of the
    cells {c_j >= h_j, c_i <= h_i for i < j}; only full-dimensional cells are kept.
    """
    hull = with_implicit_equalities(ambient)
    dim = affine_dim(hull)
    if dim < 0:
        return None
    covering = []
    for piece in pieces:
        if affine_dim(hull.with_constraints(piece.constraints)) == dim:
            covering.append(_binding_constraints(hull, piece))

    def search(cell: HPolytope, remaining: list[list[Constraint]]) -> dict[str, Fraction] | None:
        if not remaining:
            return relint_point(cell).point
        first, rest = remaining[0], remaining[1:]
        for j, c in enumerate(first):
            sub = cell.with_constraints([*first[:j], c.negated()])
            if affine_dim(sub) == dim:
                found = search(sub, rest)
                if found is not None:
                    return found
        return None

    point = search(hull, covering)
    if point is not None and (not ambient.contains_point(point) or any(p.polytope.contains_point(point) for p in pieces)):
        raise ArithmeticError("gap witness failed exact re-validation")
    return point


# ------ Chamber oracle ------ #
def chamber_oracle(ambient: HPolytope, pieces: Sequence[Piece]) -> VerdictKind:
    """
    Refine the ambient by every binding piece hyperplane and count, per
    full-dimensional chamber, the pieces containing its relative-interior point.
    """
    hull = with_implicit_equalities(ambient)
    dim = affine_dim(hull)
    if dim > CHAMBER_ORACLE_MAX_DIM:
        raise InputError(f"chamber oracle limited to dimension <= {CHAMBER_ORACLE_MAX_DIM}, got {dim}")
    hyperplanes: dict[tuple[int, ...], Constraint] = {}
    for piece in pieces:
        for c in _binding_constraints(hull, piece):
            key = primitive_integer_row([*c.vector(hull.vars), c.rhs])
            hyperplanes.setdefault(key, c)

    chambers: list[HPolytope] = [hull]
    for c in hyperplanes.values():
        refined = []
        for cell in chambers:
            for side in (c, c.negated()):
                sub = cell.with_constraints([side])
                if affine_dim(sub) == dim:
                    refined.append(sub)
        chambers = refined

    gap = overlap = False
    for cell in chambers:
        point = relint_point(cell).point
        count = sum(1 for piece in pieces if piece.polytope.contains_point(point))
        gap = gap or count == 0
        overlap = overlap or count >= 2
    logger.debug(f"chamber oracle: {len(hyperplanes)} hyperplanes, {len(chambers)} chambers")
    if overlap:
        return VerdictKind.OVERLAP
    return VerdictKind.GAP if gap else VerdictKind.VALID


# ------ Disjoint subsets ------ #
def maximal_disjoint_subsets(pieces: Sequence[Piece], overlaps: Sequence[tuple[int, int, object]]) -> list[tuple[int, ...]]:
    """Maximal sets of pairwise non-overlapping pieces: the maximal cliques of the non-overlap graph."""
    graph = nx.complete_graph(len(pieces))
    graph.remove_edges_from((i, j) for i, j, _ in overlaps)
    return sorted((tuple(sorted(clique)) for clique in nx.find_cliques(graph)), key=lambda c: (-len(c), c))


@dataclass(frozen=True)
class SubsetVerdict:
    members: tuple[str, ...]
    total: Fraction
    covers: bool


# ------ Report ------ #
@dataclass
class TilingReport:
    tiling: TilingSpec
    relevance: list[PieceRelevance]
    volumes: list[Fraction]
    ambient_volume: Fraction
    verdict: Verdict
    subsets: list[SubsetVerdict] = field(default_factory=list)
    oracle: VerdictKind | None = None

    @property
    def total(self) -> Fraction:
        return sum(self.volumes, Fraction(0))

    @property
    def all_relevant(self) -> bool:
        return all(r.relevant for r in self.relevance)

    @property
    def passed(self) -> bool:
        """Partial tilings never fail a run; full ones need VALID and every piece relevant."""
        return self.tiling.partial or (self.verdict.kind is VerdictKind.VALID and self.all_relevant)

    def format(self) -> str:
        tiling = self.tiling
        header = f"tiling {tiling.name} ambient={tiling.ambient_name}"
        if tiling.source:
            header += f" source={tiling.source}"
        if tiling.partial:
            header += " partial=yes"
        lines = [header]
        for relevance, volume in zip(self.relevance, self.volumes, strict=True):
            status = "relevant" if relevance.relevant else "IRRELEVANT"
            lines.append(f"  {relevance.name} {format_rational(volume)} {status}")
        lines.append(f"TOTAL {format_rational(self.total)}")
        lines.append(f"AMBIENT {format_rational(self.ambient_volume)}")
        lines.append(self.verdict.format(tiling.vars))
        for subset in self.subsets:
            state = "COVERS" if subset.covers else "PARTIAL"
            lines.append(f"  subset {{{','.join(subset.members)}}} {format_rational(subset.total)} {state}")
        if self.oracle is not None:
            lines.append(f"  chambers {self.oracle}")
        return "\n".join(lines)

    def rows(self) -> list[dict[str, object]]:
        base = {"tiling": self.tiling.name, "ambient": self.tiling.ambient_name}
        variables = self.tiling.vars
        rows = []
        for relevance, volume in zip(self.relevance, self.volumes, strict=True):
            if relevance.relevant:
                detail = format_point(relevance.witness, variables)
            else:
                piece = self.tiling.piece(relevance.name)
                detail = relevance.certificate.describe(self.tiling.ambient.intersect(piece.polytope)) \
                    if relevance.certificate is not None else "empty"
            rows.append({**base, "kind": "piece", "name": relevance.name, "volume": format_rational(volume),
                         "relevant": relevance.relevant, "detail": detail})
        rows.append({**base, "kind": "total", "name": None, "volume": format_rational(self.total), "relevant": None, "detail": None})
        rows.append({**base, "kind": "ambient", "name": None, "volume": format_rational(self.ambient_volume),
                     "relevant": None, "detail": None})
        rows.append({**base, "kind": "verdict", "name": str(self.verdict.kind), "volume": None, "relevant": None,
                     "detail": self.verdict.format(variables)})
        for subset in self.subsets:
            rows.append({**base, "kind": "subset", "name": ",".join(subset.members), "volume": format_rational(subset.total),
                         "relevant": None, "detail": "COVERS" if subset.covers else "PARTIAL"})
        if self.oracle is not None:
            rows.append({**base, "kind": "oracle", "name": str(self.oracle), "volume": None, "relevant": None, "detail": None})
        return rows


def check_cover_and_disjoint(tiling: TilingSpec, workers: int = MAX_WORKERS, oracle: bool = False) -> TilingReport:
    """
    Volume ledger and verdict for a tiling.

    Args:
        tiling (TilingSpec): pieces and the ambient they claim to tile.
        workers (int): process count for the per-piece volumes.
        oracle (bool): also run the chamber oracle (ambient dimension <= CHAMBER_ORACLE_MAX_DIM only).
    """
    ambient = tiling.ambient
    relevance = check_piece_relevance(tiling)
    hull = with_implicit_equalities(ambient)
    ambient_volume = normalized_volume(hull)
    volumes = piece_volumes(hull, tiling.pieces, workers)
    for piece, volume in zip(tiling.pieces, volumes, strict=True):
        logger.info(f"{tiling.name}: {piece.name} volume {format_rational(volume)}")

    overlaps = find_overlaps(hull, tiling.pieces)
    subsets: list[SubsetVerdict] = []
    if overlaps:
        i, j, point = overlaps[0]
        verdict = Verdict(VerdictKind.OVERLAP, point, (tiling.pieces[i].name, tiling.pieces[j].name))
        relevant = [k for k, r in enumerate(relevance) if r.relevant]
        kept = [tiling.pieces[k] for k in relevant]
        remap = {k: pos for pos, k in enumerate(relevant)}
        local = [(remap[a], remap[b], p) for a, b, p in overlaps if a in remap and b in remap]
        for members in maximal_disjoint_subsets(kept, local):
            total = sum((volumes[relevant[m]] for m in members), Fraction(0))
            subsets.append(SubsetVerdict(tuple(kept[m].name for m in members), total, total == ambient_volume))
    elif sum(volumes, Fraction(0)) == ambient_volume:
        verdict = Verdict(VerdictKind.VALID)
    else:
        point = find_gap(ambient, tiling.pieces)
        if point is None:
            raise ArithmeticError(f"{tiling.name}: volume deficit without an uncovered region")
        verdict = Verdict(VerdictKind.GAP, point)

    oracle_verdict = chamber_oracle(ambient, tiling.pieces) if oracle else None
    if oracle_verdict is not None and oracle_verdict is not verdict.kind:
        logger.warning(f"{tiling.name}: chamber oracle says {oracle_verdict}, volume ledger says {verdict.kind}")
    return TilingReport(tiling, relevance, volumes, ambient_volume, verdict, subsets, oracle_verdict)


def report_frame(reports: Sequence[TilingReport]) -> pl.DataFrame:
    rows = [row for report in reports for row in report.rows()]
    return pl.DataFrame(rows, schema=REPORT_SCHEMA)


def write_report(reports: Sequence[TilingReport], json_path: str | Path | None = None, csv_path: str | Path | None = None) -> None:
    frame = report_frame(reports)
    if json_path is not None:
        frame.write_json(json_path)
    if csv_path is not None:
        frame.write_csv(csv_path)


# ------ Tiling comparison ------ #
def same_tiling(first: TilingSpec, second: TilingSpec) -> bool:
    """Pieces agree pairwise as point sets inside the respective ambients (mutual containment), up to order."""
    if len(first.pieces) != len(second.pieces):
        return False
    unmatched = list(second.pieces)
    for piece in first.pieces:
        mine = first.ambient.intersect(piece.polytope)
        match = next(
            (other for other in unmatched
             if check_containment(mine, second.ambient.intersect(other.polytope))
             and check_containment(second.ambient.intersect(other.polytope), mine)),
            None,
        )
        if match is None:
            return False
        unmatched.remove(match)
    return True

