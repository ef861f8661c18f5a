"""Fans of rational polyhedral cones: subdivision, singularities, stars, walls.

All fans here are simplicial and are stored as a global ray list plus
maximal cones given by sorted ray-index tuples. The builders keep a caller
supplied ray order (for the quintic instance: D0..D4, P1..P10, Q1..Q10),
append newly created rays at the end, and the canonical form sorts the
index sets, so fan equality is plain tuple equality.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations, permutations
from typing import Optional, Sequence

from .intlinalg import (
    Matrix,
    Vector,
    as_matrix,
    det,
    elementary_divisors,
    gcd_vector,
    hnf_basis,
    integer_kernel,
    inverse_rational,
    mat_vec,
    primitive,
    snf,
    solve_integer,
    solve_rational,
    transpose,
)
from .polytope import LatticePolytope


@dataclass(frozen=True)
class Fan:
    rays: tuple[Vector, ...]
    max_cones: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rays = tuple(tuple(int(x) for x in r) for r in self.rays)
        cones = tuple(sorted(tuple(sorted(c)) for c in self.max_cones))
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "max_cones", cones)
        if len(set(rays)) != len(rays):
            raise ValueError("duplicate rays")
        for r in rays:
            if gcd_vector(r) != 1:
                raise ValueError(f"ray {r} is not primitive")

    @property
    def rank(self) -> int:
        return len(self.rays[0]) if self.rays else 0

    def cone_rays(self, cone: Sequence[int]) -> tuple[Vector, ...]:
        return tuple(self.rays[i] for i in cone)

    @cached_property
    def all_cones(self) -> tuple[tuple[int, ...], ...]:
        """Every nonempty face of every maximal cone (simplicial: all subsets)."""
        seen: set[tuple[int, ...]] = set()
        for c in self.max_cones:
            for k in range(1, len(c) + 1):
                seen.update(combinations(c, k))
        return tuple(sorted(seen))

    def cones_of_dim(self, d: int) -> tuple[tuple[int, ...], ...]:
        return tuple(c for c in self.all_cones if len(c) == d)

    def cone_contains(self, cone: Sequence[int], point: Sequence) -> bool:
        """Exact membership of a rational point in a simplicial cone."""
        coeffs = self.cone_coefficients(cone, point)
        return coeffs is not None and all(t >= 0 for t in coeffs)

    def cone_coefficients(self, cone: Sequence[int], point: Sequence) -> Optional[tuple[Fraction, ...]]:
        """Coefficients expressing the point over the cone's rays, or None."""
        rays = [self.rays[i] for i in cone]
        sol = solve_rational(transpose(as_matrix(rays)), point)
        if sol is None:
            return None
        # solve_rational zero-fills free variables; rays are independent, so
        # the solution is unique whenever it is consistent.
        for k, x in enumerate(point):
            if sum(Fraction(r[k]) * t for r, t in zip(rays, sol)) != Fraction(x):
                return None
        return sol

    def max_cones_containing(self, point: Sequence) -> tuple[tuple[int, ...], ...]:
        return tuple(c for c in self.max_cones if self.cone_contains(c, point))

    def supports(self, point: Sequence) -> bool:
        return bool(self.max_cones_containing(point))

    def ray_index(self, ray: Sequence[int]) -> int:
        return self.rays.index(tuple(ray))

    # -- serialization ------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps({"rays": [list(r) for r in self.rays],
                           "max_cones": [list(c) for c in self.max_cones]})

    @classmethod
    def from_json(cls, text: str) -> "Fan":
        data = json.loads(text)
        return cls(tuple(tuple(r) for r in data["rays"]),
                   tuple(tuple(c) for c in data["max_cones"]))


def face_fan(p: LatticePolytope, ray_order: Optional[Sequence[Sequence[int]]] = None) -> Fan:
    """The fan of cones over the proper faces of a polytope containing the origin.

    Maximal cones are the cones over facets; rays are the vertices, listed
    in `ray_order` when given (it must be a permutation of the vertex set).
    """
    if not p.contains((0,) * p.rank) or not all(c > 0 for _, c in p.facets):
        raise ValueError("face fan needs the origin strictly inside the polytope")
    rays = tuple(tuple(v) for v in (ray_order if ray_order is not None else p.vertices))
    if sorted(rays) != list(p.vertices):
        raise ValueError("ray_order must be a permutation of the polytope's vertices")
    index = {v: i for i, v in enumerate(rays)}
    cones = []
    for fveset in p.facet_vertex_sets:
        cones.append(tuple(sorted(index[p.vertices[i]] for i in fveset)))
    return Fan(rays, tuple(cones))


def stellar_subdivide(fan: Fan, point: Sequence[int]) -> Fan:
    """Stellar subdivision of a simplicial fan at a new primitive ray.

    Every cone containing the point is replaced by the joins of the new ray
    with its faces that avoid the point; the rest of the fan is untouched.
    The new ray is appended at the end of the ray list.
    """
    r = tuple(int(x) for x in point)
    if gcd_vector(r) != 1:
        raise ValueError(f"subdivision point {r} is not primitive")
    if r in fan.rays:
        raise ValueError(f"{r} is already a ray of the fan")
    hit = fan.max_cones_containing(r)
    if not hit:
        raise ValueError(f"{r} lies outside the support of the fan")
    new_idx = len(fan.rays)
    new_cones = [c for c in fan.max_cones if c not in set(hit)]
    for c in hit:
        for drop in c:
            rest = tuple(i for i in c if i != drop)
            if not fan.cone_contains(rest, r):
                new_cones.append(tuple(sorted(rest + (new_idx,))))
    return Fan(fan.rays + (r,), tuple(new_cones))


def walls(fan: Fan) -> tuple[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]], ...]:
    """All codimension-one cones with their two adjacent maximal cones.

    For a complete simplicial fan every wall has exactly two neighbours; any
    other count means the fan is broken and raises.
    """
    adj: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for c in fan.max_cones:
        for tau in combinations(c, len(c) - 1):
            adj.setdefault(tau, []).append(c)
    out = []
    for tau, cones in sorted(adj.items()):
        if len(cones) != 2:
            raise ValueError(f"wall {tau} has {len(cones)} adjacent maximal cones")
        out.append((tau, cones[0], cones[1]))
    return tuple(out)


def cone_multiplicity(rays: Sequence[Vector]) -> int:
    """Index of the lattice spanned by the rays inside its saturation."""
    divisors = elementary_divisors(as_matrix(rays))
    m = 1
    for d in divisors:
        m *= d
    return m


@dataclass(frozen=True)
class ConeReport:
    cone: tuple[int, ...]
    dim: int
    multiplicity: int
    smooth: bool
    gorenstein: bool
    quotient_type: Optional[tuple[int, tuple[int, ...]]]  # (r, sorted weights)


@dataclass(frozen=True)
class SingularityReport:
    fan: Fan
    cones: tuple[ConeReport, ...]

    def nonsmooth(self, dim: Optional[int] = None) -> tuple[ConeReport, ...]:
        return tuple(
            r for r in self.cones if not r.smooth and (dim is None or r.dim == dim)
        )

    def smooth_up_to(self, dim: int) -> bool:
        return all(r.smooth for r in self.cones if r.dim <= dim)


def quotient_type_class(r: int, weights: Sequence[int]) -> frozenset[tuple[int, ...]]:
    """All weight tuples equivalent to 1/r(weights) under generator choice."""
    out = set()
    for k in range(1, r):
        if gcd_vector((k, r)) == 1:
            out.add(tuple(sorted((k * w) % r for w in weights)))
    return frozenset(out)


def cyclic_quotient_type(rays: Sequence[Vector]) -> Optional[tuple[int, tuple[int, ...]]]:
    """The type 1/r(a, b, c) of the cone's cyclic quotient singularity.

    Returns None when the quotient group is not cyclic. The weights are the
    coordinates of a generator of N_sigma / (sum Z u_i) over the rays,
    normalized to the smallest sorted representative over all generators.
    """
    k = len(rays)
    col_kernel = integer_kernel(as_matrix(rays))
    saturated = integer_kernel(col_kernel) if col_kernel else hnf_basis(rays)
    coords = []
    st = transpose(saturated)
    for u in rays:
        sol = solve_rational(st, u)
        assert sol is not None and all(x.denominator == 1 for x in sol)
        coords.append(tuple(int(x) for x in sol))
    y = as_matrix(coords)  # k x k, |det| = multiplicity
    d, _, v = snf(y)
    divisors = [d[i][i] for i in range(k)]
    nontrivial = [x for x in divisors if x != 1]
    if len(nontrivial) != 1:
        return None
    r = nontrivial[0]
    # A generator of the quotient: the row of V^{-1} matching the nontrivial
    # divisor; its coordinates over the rays give the weights.
    vinv = inverse_rational(v)
    idx = divisors.index(r)
    gen = tuple(int(x) for x in vinv[idx])
    sol = solve_rational(transpose(y), gen)
    assert sol is not None
    weights = tuple(int(x * r) % r for x in sol)
    best = min(quotient_type_class(r, weights))
    return (r, best)


def classify_singularities(fan: Fan) -> SingularityReport:
    """Multiplicity, smoothness, Gorenstein flag and quotient type per cone."""
    reports = []
    for cone in fan.all_cones:
        rays = fan.cone_rays(cone)
        mult = cone_multiplicity(rays)
        smooth = mult == 1
        target = (-1,) * len(rays)
        gorenstein = solve_integer(as_matrix(rays), target) is not None
        qtype = None
        if len(cone) == 3 and not smooth:
            qtype = cyclic_quotient_type(rays)
        reports.append(ConeReport(cone, len(cone), mult, smooth, gorenstein, qtype))
    return SingularityReport(fan, tuple(reports))


def star_fan(fan: Fan, cone: Sequence[int]) -> Fan:
    """The fan of the orbit closure of a cone: images of its incident cones
    in the quotient lattice, with rays re-normalized to primitive vectors."""
    return star_fan_with_map(fan, cone)[0]


def star_fan_with_map(fan: Fan, cone: Sequence[int]) -> tuple[Fan, dict[int, int]]:
    """star_fan plus the map from original ray indices to star ray indices."""
    cone = tuple(sorted(cone))
    if cone not in fan.all_cones:
        raise ValueError(f"{cone} is not a cone of the fan")
    rays = [fan.rays[i] for i in cone]
    col_kernel = integer_kernel(as_matrix(rays))
    saturated = integer_kernel(col_kernel) if col_kernel else as_matrix(rays)
    k = len(saturated)
    d, _, v = snf(saturated)
    assert all(d[i][i] == 1 for i in range(k)), "span basis not saturated"
    # x -> (x·V) drops to the quotient by forgetting the first k coordinates.
    vmat = v
    def project(x: Vector) -> Vector:
        full = mat_vec(transpose(vmat), x)
        return tuple(full[k:])

    star_rays: list[Vector] = []
    ray_map: dict[int, int] = {}
    new_cones = []
    for c in fan.max_cones:
        if not set(cone) <= set(c):
            continue
        idxs = []
        for i in c:
            if i in cone:
                continue
            img = project(fan.rays[i])
            if not any(img):
                raise ValueError(f"ray {i} projects to zero in the star of {cone}")
            img = primitive(img)
            if i not in ray_map:
                if img in star_rays:
                    ray_map[i] = star_rays.index(img)
                else:
                    ray_map[i] = len(star_rays)
                    star_rays.append(img)
            idxs.append(ray_map[i])
        new_cones.append(tuple(sorted(idxs)))
    if not new_cones:
        raise ValueError(f"{cone} is maximal; its star fan is trivial")
    return Fan(tuple(star_rays), tuple(new_cones)), ray_map


def fans_unimodular_isomorphic(fan1: Fan, fan2: Fan) -> Optional[Matrix]:
    """A unimodular matrix mapping one complete fan onto the other, or None.

    Exhaustive over images of one anchor cone; intended for small complete
    fans of rank <= 3 (stars of rays and the standard product fixtures).
    """
    if fan1.rank != fan2.rank:
        return None
    if fan1.rank > 3:
        raise ValueError("exhaustive isomorphism search is limited to rank <= 3")
    if len(fan1.rays) != len(fan2.rays) or len(fan1.max_cones) != len(fan2.max_cones):
        return None
    anchor = fan1.max_cones[0]
    u = as_matrix([fan1.rays[i] for i in anchor])
    if abs(det(u)) == 0:
        raise ValueError("anchor cone is degenerate")
    uinv = inverse_rational(u)
    rayset2 = set(fan2.rays)
    cones2 = {tuple(sorted(c)) for c in fan2.max_cones}
    cones2_sets = {frozenset(fan2.rays[i] for i in c) for c in cones2}
    for c2 in fan2.max_cones:
        for perm in permutations(c2):
            w = as_matrix([fan2.rays[i] for i in perm])
            # Solve T · u_i = w_i for all anchor rays: T = Wᵀ · (U⁻¹)ᵀ.
            ok = True
            t = []
            for a in range(fan1.rank):
                row = []
                for b in range(fan1.rank):
                    val = sum(Fraction(w[kk][a]) * uinv[b][kk] for kk in range(len(perm)))
                    if val.denominator != 1:
                        ok = False
                        break
                    row.append(int(val))
                if not ok:
                    break
                t.append(tuple(row))
            if not ok:
                continue
            tmat = tuple(t)
            if abs(det(tmat)) != 1:
                continue
            mapped = [mat_vec(tmat, r) for r in fan1.rays]
            if set(mapped) != rayset2:
                continue
            mapped_cones = {
                frozenset(mat_vec(tmat, fan1.rays[i]) for i in c) for c in fan1.max_cones
            }
            if mapped_cones == cones2_sets:
                return tmat
    return None


def validate_fan(fan: Fan, complete: bool = True) -> None:
    """Constructive fan validation; raises with a witness on failure.

    Checks simpliciality (independent rays per cone), that pairwise maximal
    cone intersections are spanned by their shared rays, and for complete
    fans that every wall has exactly two neighbours.
    """
    from .lp import feasible_point, EQ, GE

    for c in fan.max_cones:
        rays = fan.cone_rays(c)
        if len(hnf_basis(rays)) != len(c):
            raise ValueError(f"cone {c} is not simplicial")
    for c1, c2 in combinations(fan.max_cones, 2):
        shared = tuple(sorted(set(c1) & set(c2)))
        # A point in both cones whose coefficients off the shared rays sum
        # to 1 would witness a non-face intersection.
        n1, n2 = len(c1), len(c2)
        nvars = n1 + n2
        cons = []
        for k in range(fan.rank):
            coeffs = [fan.rays[i][k] for i in c1] + [-fan.rays[j][k] for j in c2]
            cons.append((coeffs, EQ, 0))
        for v in range(nvars):
            e = [0] * nvars
            e[v] = 1
            cons.append((e, GE, 0))
        extra = [1 if (t < n1 and c1[t] not in shared) else 0 for t in range(n1)]
        extra += [1 if c2[t] not in shared else 0 for t in range(n2)]
        cons.append((extra, EQ, 1))
        if feasible_point(cons, nvars) is not None:
            raise ValueError(f"cones {c1} and {c2} intersect beyond their common face")
    if complete:
        walls(fan)


def product_fan(fans: Sequence[Fan]) -> Fan:
    """Direct product: rays padded into the sum of the ambient lattices."""
    total = sum(f.rank for f in fans)
    rays: list[Vector] = []
    offsets = []
    pos = 0
    for f in fans:
        offsets.append(pos)
        for r in f.rays:
            rays.append(tuple([0] * pos + list(r) + [0] * (total - pos - f.rank)))
        pos += f.rank
    ray_offset = []
    acc = 0
    for f in fans:
        ray_offset.append(acc)
        acc += len(f.rays)
    cones = [()]
    for fi, f in enumerate(fans):
        cones = [
            tuple(list(c) + [ray_offset[fi] + i for i in mc])
            for c in cones
            for mc in f.max_cones
        ]
    return Fan(tuple(rays), tuple(tuple(sorted(c)) for c in cones))


def p_n_fan(n: int) -> Fan:
    """The fan of projective n-space: e_1..e_n and minus their sum."""
    rays = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    rays.append(tuple(-1 for _ in range(n)))
    cones = [tuple(sorted(set(range(n + 1)) - {i})) for i in range(n + 1)]
    return Fan(tuple(rays), tuple(cones))
