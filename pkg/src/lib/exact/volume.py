"""
Exact lattice-normalized volumes.

Volumes are measured in reduced coordinates t, whose integer points are the
lattice {x in Z^n : homogeneous equalities vanish}; the unimodular simplex has
volume 1. A pulling triangulation is evaluated recursively over faces: pulling
vertex v of face F gives

    nvol(F) = sum over facets G of F not containing v of  height(v, G) * nvol(G)

where height is the lattice distance of v from aff(G) inside aff(F). Faces are
recognised combinatorially from vertex/row incidences, so no simplex list is
ever materialised.
"""

from collections.abc import Sequence
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd

from config import TRIANGULATION_ORDER
from lib.errors import InputError
from lib.exact.linalg import dot, integer_kernel
from lib.exact.polytope import HPolytope
from lib.exact.vertices import affine_dim, ambient_dim, full_dimensional_rep, tight_mask


class _FaceVolumes:
    def __init__(self, rows: Sequence[tuple[tuple[int, ...], Fraction]], vertices: Sequence[Sequence[Fraction]],
                 dim: int, order: str) -> None:
        self.rows = rows
        self.vertices = vertices
        self.dim = dim
        self.order = order
        self.masks = [tight_mask(rows, v) for v in vertices]
        # row_masks[i]: vertices tight on row i
        self.row_masks = [sum(1 << v for v, m in enumerate(self.masks) if m >> i & 1) for i in range(len(rows))]
        self.memo: dict[int, Fraction] = {}

    def tight_rows(self, face: int) -> int:
        mask = -1
        for i in _bits(face):
            mask &= self.masks[i]
        return mask

    def facets(self, face: int, tight: int) -> list[tuple[int, int]]:
        """Maximal proper faces F ∩ {row i tight}, each with one defining row."""
        by_face: dict[int, int] = {}
        for i in range(len(self.rows)):
            if tight >> i & 1:
                continue
            sub = face & self.row_masks[i]
            if sub and sub not in by_face:
                by_face[sub] = i
        candidates = sorted(by_face, key=lambda f: -f.bit_count())
        maximal: list[int] = []
        for f in candidates:
            if not any(f & m == f for m in maximal):
                maximal.append(f)
        return [(f, by_face[f]) for f in maximal]

    def volume(self, face: int) -> Fraction:
        if face in self.memo:
            return self.memo[face]
        if face.bit_count() == 1:
            return Fraction(1)
        tight = self.tight_rows(face)
        _, basis = integer_kernel([self.rows[i][0] for i in _bits(tight)], self.dim)
        members = list(_bits(face))
        apex = members[0] if self.order == "lex" else members[-1]
        total = Fraction(0)
        for facet, row in self.facets(face, tight):
            if facet >> apex & 1:
                continue
            g, h = self.rows[row]
            restricted = [sum(a * b for a, b in zip(g, column, strict=True)) for column in basis]
            unit = reduce(gcd, restricted, 0)
            height = (h - dot(g, self.vertices[apex])) / unit
            total += height * self.volume(facet)
        self.memo[face] = total
        return total


def _bits(mask: int) -> list[int]:
    out = []
    index = 0
    while mask:
        if mask & 1:
            out.append(index)
        mask >>= 1
        index += 1
    return out


@lru_cache(maxsize=512)
def normalized_volume(polytope: HPolytope, order: str = TRIANGULATION_ORDER) -> Fraction:
    """
    Lattice-normalized volume (Euclidean volume x dim!) inside the affine hull of
    the equalities; 0 when the polytope is lower-dimensional there or empty.

    Args:
        polytope (HPolytope): bounded polytope, UnboundedError otherwise.
        order (str): "lex" pulls the smallest vertex of each face, "reverse" the largest.
    """
    if order not in ("lex", "reverse"):
        raise InputError(f"unknown triangulation order '{order}'")
    dim = affine_dim(polytope)
    if dim < 0 or dim < ambient_dim(polytope):
        full_dimensional_rep(polytope)  # still reject unbounded input
        return Fraction(0)
    rep = full_dimensional_rep(polytope)
    if rep.dim == 0:
        return Fraction(1)
    faces = _FaceVolumes(rep.rows, rep.vertices, rep.dim, order)
    return faces.volume((1 << len(rep.vertices)) - 1)
