"""Lattice polytopes: exact hulls, polar duality, face lattice, point classification.

Everything is dimension-agnostic but tuned for the desk scale of this
project (rank <= 4, a few dozen points), so facet enumeration simply scans
affinely independent point subsets and keeps the supporting hyperplanes.

Conventions: a facet is a pair (normal, offset) representing the valid
inequality <normal, x> >= -offset with the normal primitive; a face is the
sorted tuple of vertex indices tight on a set of facets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from math import gcd
from typing import Iterable, Optional, Sequence

from .intlinalg import (
    Vector,
    as_matrix,
    dot,
    gcd_vector,
    hnf_basis,
    integer_kernel,
    vec_sub,
)


def affine_rank(points: Sequence[Sequence[int]]) -> int:
    """Dimension of the affine span of the given points (-1 for the empty set)."""
    if not points:
        return -1
    base = points[0]
    diffs = [vec_sub(p, base) for p in points[1:]]
    return len(hnf_basis(diffs))


@dataclass(frozen=True)
class Face:
    vertices: tuple[int, ...]  # sorted vertex indices
    dim: int


@dataclass(frozen=True)
class PointRecord:
    point: Vector
    carrier: tuple[int, ...]  # vertex indices of the carrier face; () = interior
    carrier_dim: int


@dataclass(frozen=True)
class ClassifiedPoints:
    polytope: "LatticePolytope"
    records: tuple[PointRecord, ...]

    @property
    def counts_by_dim(self) -> tuple[int, ...]:
        """Census vector indexed by carrier dimension 0..rank."""
        counts = [0] * (self.polytope.rank + 1)
        for rec in self.records:
            counts[rec.carrier_dim] += 1
        return tuple(counts)

    def records_with_dim(self, d: int) -> tuple[PointRecord, ...]:
        return tuple(r for r in self.records if r.carrier_dim == d)


class LatticePolytope:
    """A full-dimensional polytope with integer vertex coordinates.

    Instances are immutable; derived data (face lattice, lattice points,
    polar dual) is computed lazily and cached.
    """

    def __init__(self, vertices: Sequence[Sequence[int]], facets: Sequence[tuple[Sequence[int], int]]):
        self.vertices: tuple[Vector, ...] = tuple(sorted(tuple(int(x) for x in v) for v in vertices))
        self.facets: tuple[tuple[Vector, int], ...] = tuple(
            sorted((tuple(int(x) for x in n), int(c)) for n, c in facets)
        )
        self.rank: int = len(self.vertices[0]) if self.vertices else 0

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticePolytope) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        return f"LatticePolytope(rank={self.rank}, vertices={len(self.vertices)}, facets={len(self.facets)})"

    # -- containment ------------------------------------------------------

    def contains(self, point: Sequence) -> bool:
        return all(dot(n, point) >= -c for n, c in self.facets)

    def tight_facets(self, point: Sequence) -> tuple[int, ...]:
        return tuple(i for i, (n, c) in enumerate(self.facets) if dot(n, point) == -c)

    # -- faces -------------------------------------------------------------

    @cached_property
    def facet_vertex_sets(self) -> tuple[frozenset[int], ...]:
        out = []
        for n, c in self.facets:
            out.append(frozenset(i for i, v in enumerate(self.vertices) if dot(n, v) == -c))
        return tuple(out)

    @cached_property
    def faces(self) -> tuple[Face, ...]:
        """All proper nonempty faces, plus the polytope itself as the top face."""
        sets = set(self.facet_vertex_sets)
        frontier = set(sets)
        while frontier:
            new = set()
            for a in frontier:
                for b in self.facet_vertex_sets:
                    c = a & b
                    if c and c not in sets and c not in new:
                        new.add(c)
            sets |= new
            frontier = new
        faces = [Face(tuple(sorted(s)), affine_rank([self.vertices[i] for i in s])) for s in sets]
        faces.append(Face(tuple(range(len(self.vertices))), self.rank))
        faces.sort(key=lambda f: (f.dim, f.vertices))
        return tuple(faces)

    def faces_of_dim(self, d: int) -> tuple[Face, ...]:
        return tuple(f for f in self.faces if f.dim == d)

    def face_by_vertices(self, idxs: Iterable[int]) -> Face:
        key = tuple(sorted(idxs))
        for f in self.faces:
            if f.vertices == key:
                return f
        raise ValueError(f"vertex set {key} is not a face")

    def carrier_face(self, point: Sequence) -> Face:
        """The unique face containing the point in its relative interior."""
        if not self.contains(point):
            raise ValueError(f"point {tuple(point)} is not in the polytope")
        tight = self.tight_facets(point)
        if not tight:
            return self.faces[-1]  # interior point; carrier is the whole polytope
        common = frozenset.intersection(*[self.facet_vertex_sets[i] for i in tight])
        return self.face_by_vertices(common)

    # -- lattice points ----------------------------------------------------

    @cached_property
    def lattice_points(self) -> tuple[Vector, ...]:
        lo = [min(v[i] for v in self.vertices) for i in range(self.rank)]
        hi = [max(v[i] for v in self.vertices) for i in range(self.rank)]
        pts = []
        for candidate in product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
            if self.contains(candidate):
                pts.append(candidate)
        return tuple(pts)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> str:
        return json.dumps({"rank": self.rank, "vertices": [list(v) for v in self.vertices]})

    @classmethod
    def from_json(cls, text: str) -> "LatticePolytope":
        data = json.loads(text)
        poly = convex_hull(data["vertices"])
        if poly.rank != data["rank"]:
            raise ValueError(f"rank field {data['rank']} does not match computed rank {poly.rank}")
        return poly


def convex_hull(points: Sequence[Sequence[int]]) -> LatticePolytope:
    """Exact convex hull of a full-dimensional set of lattice points.

    Returns the polytope with irredundant vertex and facet lists. Input that
    does not affinely span the ambient space is rejected, reporting the rank
    of its affine hull.
    """
    pts = [tuple(int(x) for x in p) for p in points]
    pts = sorted(set(pts))
    if not pts:
        raise ValueError("empty point set")
    d = len(pts[0])
    ar = affine_rank(pts)
    if ar < d:
        raise ValueError(f"points span an affine subspace of dimension {ar} < {d}")

    # Every facet hyperplane is spanned by d affinely independent points.
    facets: dict[tuple[Vector, int], None] = {}
    for subset in combinations(range(len(pts)), d):
        chosen = [pts[i] for i in subset]
        diffs = [vec_sub(p, chosen[0]) for p in chosen[1:]]
        kernel = integer_kernel(as_matrix(diffs)) if diffs else ()
        if len(kernel) != 1:
            continue  # affinely dependent, or not a hyperplane
        normal = kernel[0]
        level = dot(normal, chosen[0])
        values = [dot(normal, p) for p in pts]
        if all(v >= level for v in values):
            pass
        elif all(v <= level for v in values):
            normal = tuple(-x for x in normal)
            level = -level
        else:
            continue
        g = gcd_vector(normal)
        normal = tuple(x // g for x in normal)
        level = level // g
        facets.setdefault((normal, -level), None)

    facet_list = list(facets)
    vertices = []
    for p in pts:
        tight = [n for n, c in facet_list if dot(n, p) == -c]
        if len(hnf_basis(tight)) == d:
            vertices.append(p)
    return LatticePolytope(vertices, facet_list)


def is_reflexive(p: LatticePolytope) -> bool:
    """True iff every facet inequality has offset exactly 1."""
    return all(c == 1 for _, c in p.facets)


def polar_dual(p: LatticePolytope) -> LatticePolytope:
    """The polar polytope {y : <y, x> >= -1 for all x in p}.

    Requires the origin strictly inside p; the error names a separating
    facet otherwise. The result must again have lattice vertices (true for
    reflexive input, which is the only use here).
    """
    for n, c in p.facets:
        if c <= 0:
            raise ValueError(f"origin is not interior: facet {n} has offset {c}")
    dual_vertices = []
    for n, c in p.facets:
        if any(x % c for x in n):
            raise ValueError(f"polar dual vertex {n}/{c} is not a lattice point")
        dual_vertices.append(tuple(x // c for x in n))
    return convex_hull(dual_vertices)


# The polar dual is cached on the instance so that repeated dual-face queries
# do not recompute the hull.
def _cached_dual(p: LatticePolytope) -> LatticePolytope:
    cached = getattr(p, "_polar_dual", None)
    if cached is None:
        cached = polar_dual(p)
        object.__setattr__(p, "_polar_dual", cached)
    return cached


def dual_face(p: LatticePolytope, face: Face) -> Face:
    """The face of the polar dual pairing to -1 with all of the given face.

    Inclusion-reversing with dim(face) + dim(dual) = rank - 1 on proper
    faces of a reflexive polytope.
    """
    if face.dim >= p.rank:
        raise ValueError("dual_face is defined for proper faces only")
    dual = _cached_dual(p)
    gens = [p.vertices[i] for i in face.vertices]
    idxs = [
        j for j, w in enumerate(dual.vertices)
        if all(dot(w, v) == -1 for v in gens)
    ]
    if not idxs:
        raise ValueError(f"face {face.vertices} has empty dual face")
    return dual.face_by_vertices(idxs)


def dual_face_of_points(p_dual: LatticePolytope, generators: Sequence[Sequence[int]]) -> tuple[Vector, ...]:
    """Vertices of {m in p_dual : <m, v> = -1 for all given v}; may be empty.

    Unlike dual_face this accepts arbitrary boundary lattice points (not
    only vertices) and returns a possibly-empty vertex tuple, which is what
    hypersurface stratum analysis needs.
    """
    return tuple(
        w for w in p_dual.vertices if all(dot(w, v) == -1 for v in generators)
    )


def classify_lattice_points(p: LatticePolytope) -> ClassifiedPoints:
    """Label every lattice point of p with its carrier face and dimension."""
    records = []
    for pt in p.lattice_points:
        face = p.carrier_face(pt)
        carrier = face.vertices if face.dim < p.rank else ()
        records.append(PointRecord(pt, carrier, face.dim))
    return ClassifiedPoints(p, tuple(records))


def edge_lattice_length(a: Sequence[int], b: Sequence[int]) -> int:
    """Number of lattice segments on the edge [a, b]: gcd of the difference."""
    diff = vec_sub(b, a)
    g = gcd_vector(diff)
    if g == 0:
        raise ValueError("degenerate edge")
    return g
