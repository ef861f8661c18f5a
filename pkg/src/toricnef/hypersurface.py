"""Combinatorial contact analysis of the generic anticanonical hypersurface.

No equation is ever written down: a cone's orbit meets the generic
hypersurface exactly when the face of the Newton polytope pairing to -1
with all of the cone's generators has dimension at least one, it misses the
orbit when that face is a single vertex (one monomial never vanishes on a
torus), and an empty face means the defining section restricts to zero.
When the dual face is an edge, its lattice length counts the intersection
points with the corresponding curve.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .circuits import Circuit, FlipResult, flip, is_supported
from .fan import Fan
from .intlinalg import Vector
from .polytope import (
    LatticePolytope,
    affine_rank,
    dual_face_of_points,
    edge_lattice_length,
)


@dataclass(frozen=True)
class StratumVerdict:
    generators: tuple[Vector, ...]
    dual_face: tuple[Vector, ...]   # vertices of Delta pairing -1 with all generators
    dual_dim: int                   # -1 when the dual face is empty
    meets: bool
    intersection_count: Optional[int]  # lattice length when the dual face is an edge

    @property
    def misses(self) -> bool:
        return not self.meets


def stratum_meets(generators: Sequence[Vector], delta: LatticePolytope,
                  delta_star: LatticePolytope) -> StratumVerdict:
    """Whether the orbit of a cone over boundary points meets the hypersurface."""
    gens = tuple(tuple(v) for v in generators)
    for g in gens:
        if not delta_star.contains(g) or not delta_star.tight_facets(g):
            raise ValueError(f"generator {g} is not on the boundary of the dual polytope")
    dual = dual_face_of_points(delta, gens)
    dim = affine_rank(dual)
    count = None
    if dim == 1 and len(dual) == 2:
        count = edge_lattice_length(dual[0], dual[1])
    return StratumVerdict(gens, dual, dim, dim >= 1, count)


def _face_vector_sets(fan: Fan) -> set[frozenset[Vector]]:
    out: set[frozenset[Vector]] = set()
    for c in fan.all_cones:
        out.add(frozenset(fan.rays[i] for i in c))
    return out


def exchanged_strata(fan: Fan, result: FlipResult) -> tuple[tuple[Vector, ...], ...]:
    """All cones (with faces) on either side of a flip but not on both.

    Cones are compared by their ray vector sets since a divisorial flip
    renumbers rays.
    """
    before = _face_vector_sets(fan)
    after = _face_vector_sets(result.fan)
    diff = before.symmetric_difference(after)
    return tuple(sorted(tuple(sorted(s)) for s in diff))


@dataclass(frozen=True)
class TrivialityReport:
    trivial: bool
    reason: str
    verdicts: tuple[StratumVerdict, ...]
    result: Optional[FlipResult]


def is_trivial_flip(fan: Fan, circuit: Circuit, delta: LatticePolytope,
                    delta_star: LatticePolytope) -> TrivialityReport:
    """A supported circuit gives a trivial flip iff it is a flop whose
    exchanged strata (faces included) all miss the generic hypersurface."""
    witness = is_supported(circuit, fan)
    if not witness.supported:
        raise ValueError(f"circuit {circuit.rays} is not supported: {witness.reason}")
    if len(circuit.negative) < 2 or len(circuit.positive) < 2:
        result = flip(fan, circuit)
        return TrivialityReport(False, "divisorial, not a flop", (), result)
    result = flip(fan, circuit)
    verdicts = []
    for gens in exchanged_strata(fan, result):
        verdicts.append(stratum_meets(gens, delta, delta_star))
    # Disjointness from the hypersurface needs a vertex dual face: dimension
    # one or more meets the orbit, and an empty dual face means the defining
    # section vanishes identically there (the orbit would be contained).
    bad = [v for v in verdicts if v.dual_dim != 0]
    if bad:
        what = "meets the hypersurface" if bad[0].dual_dim >= 1 else "is contained in the hypersurface"
        return TrivialityReport(
            False,
            f"stratum {bad[0].generators} {what}",
            tuple(verdicts),
            result,
        )
    return TrivialityReport(True, "flop with all exceptional strata missing", tuple(verdicts), result)


def component_count_on_hypersurface(ray: Vector, delta: LatticePolytope,
                                    delta_star: LatticePolytope) -> int:
    """Number of components of the exceptional divisor's restriction.

    Defined for rays carried by a two-dimensional face: one plus the
    interior lattice points of the dual edge, i.e. the edge's lattice
    length; one means the restriction is irreducible.
    """
    face = delta_star.carrier_face(tuple(ray))
    if face.dim != 2:
        raise ValueError(f"ray {tuple(ray)} has carrier of dimension {face.dim}, not 2")
    verdict = stratum_meets([tuple(ray)], delta, delta_star)
    if verdict.dual_dim != 1 or verdict.intersection_count is None:
        raise ValueError(f"dual face of {tuple(ray)} is not an edge")
    return verdict.intersection_count
