"""Invariant-monomial sublattices of diagonal group actions on projective space.

A finite abelian group acting diagonally on P^k by roots of unity induces an
action on torus characters; the invariant monomials form a finite-index
sublattice of the character lattice. Rebasing a polytope onto that
sublattice produces the quotient's defining polytope.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .intlinalg import Matrix, Vector, as_matrix, det, hnf_basis, identity, solve_rational
from .polytope import LatticePolytope, convex_hull


@dataclass(frozen=True)
class DiagonalAction:
    """Weights of a diagonal action on the torus chart z0 = 1.

    order: the order n of the root of unity; generators: weight vectors of
    z1..zk in (Z/n)^k, already reduced into [0, n).
    """

    order: int
    generators: tuple[Vector, ...]

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("group order must be >= 1")
        object.__setattr__(
            self,
            "generators",
            tuple(tuple(w % self.order for w in g) for g in self.generators),
        )

    @classmethod
    def from_projective_weights(cls, order: int, weights: Sequence[Sequence[int]]) -> "DiagonalAction":
        """Build from weights on all homogeneous coordinates (z0..zk).

        Subtracts the z0 weight so the action is expressed on the chart
        z0 = 1, matching the 4-tuple coordinates used throughout.
        """
        gens = [tuple(w - ws[0] for w in ws[1:]) for ws in weights]
        return cls(order, tuple(gens))


@dataclass(frozen=True)
class Sublattice:
    """A finite-index sublattice given by an HNF basis (rows, ambient coords)."""

    ambient_rank: int
    basis: Matrix
    index: int

    def contains(self, point: Sequence[int]) -> bool:
        x = solve_rational(tuple(zip(*self.basis)), point)
        return x is not None and all(v.denominator == 1 for v in x)


def invariant_sublattice(action: DiagonalAction) -> Sublattice:
    """The sublattice of monomials fixed by every generator of the action.

    Returns {m : sum_i m_i w_i = 0 mod n for every generator w} with its HNF
    basis; the index equals the order of the group acting effectively on the
    torus.
    """
    rank = len(action.generators[0]) if action.generators else 4
    n = action.order
    if not action.generators or all(not any(g) for g in action.generators):
        return Sublattice(rank, identity(rank), 1)
    if any(len(g) != rank for g in action.generators):
        raise ValueError("generator weight vectors have inconsistent lengths")
    # m is invariant iff (m, k) solves W m + n k = 0 for some integer k; the
    # sublattice is the projection of that kernel onto the m block.
    g = len(action.generators)
    stacked = as_matrix(
        [list(w) + [n if j == i else 0 for j in range(g)] for i, w in enumerate(action.generators)]
    )
    from .intlinalg import integer_kernel

    kernel = integer_kernel(stacked)
    basis = hnf_basis([row[:rank] for row in kernel])
    if len(basis) != rank:
        raise AssertionError("invariant sublattice is not full rank")
    return Sublattice(rank, basis, abs(det(basis)))


def rebase_polytope(p: LatticePolytope, sub: Sublattice) -> LatticePolytope:
    """Re-express a polytope's vertices in the coordinates of a sublattice basis.

    Every vertex must lie in the sublattice; the offending vertex is reported
    otherwise. The combinatorics is unchanged (same face numbers), only the
    coordinates move.
    """
    bt = tuple(zip(*sub.basis))
    new_vertices = []
    for v in p.vertices:
        x = solve_rational(bt, v)
        if x is None or any(c.denominator != 1 for c in x):
            raise ValueError(f"vertex {v} does not lie in the sublattice")
        new_vertices.append(tuple(int(c) for c in x))
    out = convex_hull(new_vertices)
    if len(out.facets) != len(p.facets) or len(out.vertices) != len(p.vertices):
        raise AssertionError("rebasing changed the combinatorics")
    return out
