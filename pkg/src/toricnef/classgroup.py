"""Divisor class space via the linear Gale transform, wall curve classes,
and exact cone arithmetic for the GKZ cones cpl(fan).

The class space W of a fan with R spanning rays in a rank-n lattice is the
quotient of ray-divisor space by the lattice's linear functionals. It is
realized concretely as a coordinate subspace: a deterministic set of n ray
coordinates is eliminated through the ray matrix, leaving R - n honest
coordinates; all cone arithmetic happens there with exact rationals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import gcd
from typing import Optional, Sequence

from . import lp
from .fan import Fan, cone_multiplicity, walls
from .intlinalg import (
    as_matrix,
    dot,
    elementary_divisors,
    hnf_basis,
    integer_kernel,
    inverse_rational,
    transpose,
)


@dataclass(frozen=True)
class ClassSpace:
    """W = R^rays / M_R for a fixed fan, realized on the `free` coordinates."""

    rays: tuple[tuple[int, ...], ...]
    eliminated: tuple[int, ...]   # ray indices expressed through the others
    free: tuple[int, ...]         # ray indices carrying the W coordinates
    torsion: tuple[int, ...]      # nontrivial elementary divisors (report only)

    @property
    def dim(self) -> int:
        return len(self.free)

    @cached_property
    def _elim_inverse(self):
        return inverse_rational(as_matrix([self.rays[i] for i in self.eliminated]))

    def project(self, ray_vector: Sequence) -> tuple[Fraction, ...]:
        """Class of a ray-divisor coefficient vector in W coordinates.

        Subtracts the unique M_R functional matching the vector on the
        eliminated rays, then reads off the free coordinates.
        """
        x = [Fraction(v) for v in ray_vector]
        rhs = [x[i] for i in self.eliminated]
        m = tuple(
            sum(self._elim_inverse[r][c] * rhs[c] for c in range(len(rhs)))
            for r in range(len(self.eliminated))
        )
        return tuple(
            x[j] - sum(m[k] * self.rays[j][k] for k in range(len(m))) for j in self.free
        )

    def divisor_class(self, ray_index: int) -> "DivisorClass":
        e = [0] * len(self.rays)
        e[ray_index] = 1
        return DivisorClass(self.project(e), tuple(Fraction(v) for v in e))

    def anticanonical_class(self) -> "DivisorClass":
        ones = (1,) * len(self.rays)
        return DivisorClass(self.project(ones), tuple(Fraction(1) for _ in self.rays))


@dataclass(frozen=True)
class DivisorClass:
    w: tuple[Fraction, ...]
    representative: Optional[tuple[Fraction, ...]] = None

    def to_json(self) -> str:
        return json.dumps({"w": [str(c) for c in self.w]})

    @classmethod
    def from_json(cls, text: str) -> "DivisorClass":
        return cls(tuple(Fraction(s) for s in json.loads(text)["w"]))


def class_space(fan: Fan) -> ClassSpace:
    """The Gale-transform class space of a fan whose rays span the lattice.

    The eliminated coordinates are the lexicographically first ray indices
    whose rays are linearly independent (deterministic), and the integral
    torsion is reported from the Smith form of the ray matrix.
    """
    rays = fan.rays
    n = fan.rank
    if len(hnf_basis(rays)) != n:
        raise ValueError("rays do not span the lattice")
    chosen: list[int] = []
    for i in range(len(rays)):
        if len(hnf_basis([rays[j] for j in chosen + [i]])) > len(chosen):
            chosen.append(i)
        if len(chosen) == n:
            break
    free = tuple(i for i in range(len(rays)) if i not in chosen)
    torsion = tuple(d for d in elementary_divisors(as_matrix(rays)) if d != 1)
    return ClassSpace(rays, tuple(chosen), free, torsion)


@dataclass(frozen=True)
class CurveFunctional:
    """The linear functional on W dual to a wall curve.

    Coefficients live on the rays of the two maximal cones adjacent to the
    wall and are normalized so they equal the toric intersection numbers
    D_ray · V(wall); they annihilate M_R by construction, so the functional
    is well-defined on W.
    """

    wall: tuple[int, ...]
    coefficients: tuple[tuple[int, Fraction], ...]  # (ray index, coefficient)
    covector: tuple[Fraction, ...]                  # on the free W coordinates

    def value(self, w: Sequence[Fraction]) -> Fraction:
        return sum(c * x for c, x in zip(self.covector, w))

    def degree(self) -> Fraction:
        return sum(c for _, c in self.coefficients)

    def coefficient_of(self, ray_index: int) -> Fraction:
        for i, c in self.coefficients:
            if i == ray_index:
                return c
        return Fraction(0)

    def to_json(self) -> str:
        return json.dumps({
            "wall": list(self.wall),
            "coeffs": {str(i): str(c) for i, c in self.coefficients},
        })


def wall_relation(fan: Fan, wall_triple) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Primitive integer relation on the rays of the two cones at a wall.

    Returns (ray indices, coefficients) with the coefficient of the ray
    completing the first adjacent cone chosen positive.
    """
    tau, sigma, sigma2 = wall_triple
    support = tuple(sorted(set(sigma) | set(sigma2)))
    kernel = integer_kernel(transpose(as_matrix([fan.rays[i] for i in support])))
    if len(kernel) != 1:
        raise ValueError(f"wall {tau} is degenerate")
    rel = kernel[0]
    a = next(i for i in sigma if i not in tau)
    if rel[support.index(a)] < 0:
        rel = tuple(-x for x in rel)
    return support, rel


def wall_curve_class(space: ClassSpace, fan: Fan, wall_triple) -> CurveFunctional:
    """The intersection-number functional of a wall.

    Normalized so the coefficient of the ray completing the first adjacent
    cone equals mult(wall) / mult(cone); on smooth fans all coefficients are
    integers and the two completing rays get coefficient one.
    """
    tau, sigma, _ = wall_triple
    support, rel = wall_relation(fan, wall_triple)
    a = next(i for i in sigma if i not in tau)
    m_tau = cone_multiplicity(fan.cone_rays(tau))
    m_sigma = cone_multiplicity(fan.cone_rays(sigma))
    scale = Fraction(m_tau, m_sigma) / Fraction(rel[support.index(a)])
    coeffs = tuple(
        (i, scale * r) for i, r in zip(support, rel) if r != 0
    )
    full = [Fraction(0)] * len(fan.rays)
    for i, c in coeffs:
        full[i] = c
    covector = tuple(full[j] for j in space.free)
    return CurveFunctional(tuple(tau), coeffs, covector)


def anticanonical_degree(space: ClassSpace, fan: Fan, wall_triple) -> Fraction:
    """(-K)·V(wall) = sum of the wall functional's coefficients."""
    return wall_curve_class(space, fan, wall_triple).degree()


def anticanonical_degree_via_star(space: ClassSpace, fan: Fan, wall_triple, rho: int) -> Fraction:
    """Independent recomputation of (-K)·V(wall) through the star of a ray.

    For a wall containing the ray rho, the wall curve lies in the orbit
    closure E = V(rho); by adjunction its anticanonical degree splits as
    deg(-K_E restricted) + D_rho·curve, where the first term is computed
    entirely inside the star fan of rho and the second is the rho
    coefficient of the ambient wall relation.
    """
    from .fan import star_fan_with_map

    tau, sigma, sigma2 = wall_triple
    if rho not in tau:
        raise ValueError("the chosen ray must lie on the wall")
    star, ray_map = star_fan_with_map(fan, (rho,))
    star_tau = tuple(sorted(ray_map[i] for i in tau if i != rho))
    star_sigma = tuple(sorted(ray_map[i] for i in sigma if i != rho))
    star_sigma2 = tuple(sorted(ray_map[i] for i in sigma2 if i != rho))
    star_space = class_space(star)
    inner = wall_curve_class(star_space, star, (star_tau, star_sigma, star_sigma2))
    ambient = wall_curve_class(space, fan, wall_triple)
    return inner.degree() + ambient.coefficient_of(rho)


def dedupe_covectors(functionals: Sequence[CurveFunctional]) -> list[tuple[tuple[Fraction, ...], list[CurveFunctional]]]:
    """Group functionals by their covector up to positive scaling."""
    groups: dict[tuple, list[CurveFunctional]] = {}
    for f in functionals:
        denom = 1
        for c in f.covector:
            denom = denom * c.denominator // gcd(denom, c.denominator)
        ints = [int(c * denom) for c in f.covector]
        g = 0
        for x in ints:
            g = gcd(g, x)
        key = tuple(x // g for x in ints) if g else tuple(ints)
        groups.setdefault(key, []).append(f)
    return [(k, v) for k, v in groups.items()]


class PolyCone:
    """A rational polyhedral cone {x : eq·x = 0, ineq·x >= 0} in R^dim.

    Keeps the inequality description authoritative; extreme rays are
    computed on demand by double description (intended for small ambient
    dimension) and a relative interior point either as the sum of extreme
    rays or through the exact LP, whichever is available first.
    """

    def __init__(self, dim: int, inequalities: Sequence[Sequence], equalities: Sequence[Sequence] = ()):
        self.dim = dim
        self.inequalities = tuple(tuple(Fraction(c) for c in f) for f in inequalities)
        self.equalities = tuple(tuple(Fraction(c) for c in e) for e in equalities)
        self._generators: Optional[tuple[tuple[int, ...], ...]] = None
        self._implicit: Optional[tuple[int, ...]] = None
        self._relint_point: Optional[tuple[Fraction, ...]] = None

    # -- membership and basic queries ---------------------------------------

    def contains(self, w: Sequence) -> bool:
        w = [Fraction(x) for x in w]
        return all(dot(e, w) == 0 for e in self.equalities) and all(
            dot(f, w) >= 0 for f in self.inequalities
        )

    def tight_inequalities(self, w: Sequence) -> tuple[int, ...]:
        w = [Fraction(x) for x in w]
        return tuple(i for i, f in enumerate(self.inequalities) if dot(f, w) == 0)

    def _relint_data(self) -> tuple[tuple[int, ...], tuple[Fraction, ...]]:
        """Implicit-equality indices plus a relative interior point.

        Iterates the Farkas alternative: while {remaining >= 1} is
        infeasible, the certificate is a nonnegative combination of
        functionals summing to zero on the cone, so its support vanishes
        identically and moves to the equality side.
        """
        if self._implicit is not None:
            return self._implicit, self._relint_point
        active = list(range(len(self.inequalities)))
        implicit: list[int] = []
        eqs = list(self.equalities)
        while True:
            funcs = [self.inequalities[i] for i in active]
            if not funcs:
                point = (Fraction(0),) * self.dim
                break
            cols = [list(f) + [1] for f in funcs]
            for e in eqs:
                cols.append(list(e) + [0])
                cols.append([-x for x in e] + [0])
            solvable, cert = lp.nonneg_solve(cols, [0] * self.dim + [1])
            if not solvable:
                w, t = cert[:self.dim], cert[-1]
                point = tuple(-x / t for x in w)
                break
            lam = cert[: len(funcs)]
            newly = [active[k] for k, l in enumerate(lam) if l > 0]
            assert newly, "zero certificate from Farkas alternative"
            for i in newly:
                implicit.append(i)
                eqs.append(self.inequalities[i])
            active = [i for i in active if i not in set(newly)]
        self._implicit = tuple(sorted(implicit))
        self._relint_point = point
        return self._implicit, self._relint_point

    @property
    def implicit_equalities(self) -> tuple[int, ...]:
        """Indices of inequalities that vanish identically on the cone."""
        return self._relint_data()[0]

    def cone_dim(self) -> int:
        implicit, _ = self._relint_data()
        rows = [self.inequalities[i] for i in implicit]
        rows += list(self.equalities)
        if not rows:
            return self.dim
        denom = 1
        for row in rows:
            for c in row:
                denom = denom * c.denominator // gcd(denom, c.denominator)
        ints = [[int(c * denom) for c in row] for row in rows]
        return self.dim - len(hnf_basis(ints))

    def is_full_dimensional(self) -> bool:
        implicit, _ = self._relint_data()
        return not implicit and all(not any(e) for e in self.equalities)

    def interior_point(self) -> Optional[tuple[Fraction, ...]]:
        """A point with every inequality strictly positive, if one exists."""
        return self._relint_data()[1] if self.is_full_dimensional() else None

    def relative_interior_point(self) -> tuple[Fraction, ...]:
        """Sum of extreme rays when generators are known, else the LP point."""
        if self._generators is not None and self._generators:
            return tuple(sum(Fraction(g[j]) for g in self._generators) for j in range(self.dim))
        return self._relint_data()[1]

    def is_valid_inequality(self, functional: Sequence) -> bool:
        """True iff the functional is nonnegative on the whole cone.

        By Farkas this means membership of the functional in the dual cone
        spanned by the inequality functionals and the equality span.
        """
        f = [Fraction(c) for c in functional]
        cols = [list(g) for g in self.inequalities]
        for e in self.equalities:
            cols.append(list(e))
            cols.append([-x for x in e])
        solvable, _ = lp.nonneg_solve(cols, f)
        return solvable

    def face(self, functional: Sequence) -> "PolyCone":
        """The face cut out by a valid inequality (f >= 0 on the cone)."""
        f = tuple(Fraction(c) for c in functional)
        if not self.is_valid_inequality(f):
            raise ValueError("functional is negative somewhere on the cone")
        return PolyCone(self.dim, self.inequalities, tuple(self.equalities) + (f,))

    # -- generators ----------------------------------------------------------

    def generators(self) -> tuple[tuple[int, ...], ...]:
        """Extreme rays as primitive integer vectors (double description)."""
        if self._generators is None:
            self._generators = _double_description(self.dim, self.inequalities, self.equalities)
        return self._generators


def _primitive_fraction_vector(v: Sequence[Fraction]) -> tuple[int, ...]:
    denom = 1
    for c in v:
        denom = denom * c.denominator // gcd(denom, c.denominator)
    ints = [int(c * denom) for c in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints) if g else tuple(ints)


def _double_description(dim, inequalities, equalities) -> tuple[tuple[int, ...], ...]:
    """Incremental double description; deterministic insertion order."""
    # Start from the equality subspace presented by a line basis.
    if equalities:
        denom = 1
        for e in equalities:
            for c in e:
                denom = denom * c.denominator // gcd(denom, c.denominator)
        eq_int = as_matrix([[int(c * denom) for c in e] for e in equalities])
        lines = [tuple(Fraction(x) for x in row) for row in integer_kernel(eq_int)]
    else:
        lines = [tuple(Fraction(1 if j == i else 0) for j in range(dim)) for i in range(dim)]
    rays: list[tuple[Fraction, ...]] = []
    inserted: list[tuple[Fraction, ...]] = []

    def values(vec):
        return [dot(f, vec) for f in inserted]

    for f in inequalities:
        fvals_lines = [dot(f, l) for l in lines]
        pivot = next((k for k, v in enumerate(fvals_lines) if v != 0), None)
        if pivot is not None:
            l0 = lines[pivot]
            v0 = fvals_lines[pivot]
            if v0 < 0:
                l0 = tuple(-x for x in l0)
                v0 = -v0
            new_lines = []
            for k, l in enumerate(lines):
                if k == pivot:
                    continue
                vk = fvals_lines[k] if k != pivot else v0
                new_lines.append(tuple(a - Fraction(vk, v0) * b for a, b in zip(l, l0)))
            new_rays = []
            for r in rays:
                vr = dot(f, r)
                if vr >= 0:
                    new_rays.append(r)
                else:
                    new_rays.append(tuple(a + Fraction(-vr, v0) * b for a, b in zip(r, l0)))
            new_rays.append(l0)
            lines, rays = new_lines, new_rays
            inserted.append(tuple(f))
            continue
        plus = [r for r in rays if dot(f, r) > 0]
        zero = [r for r in rays if dot(f, r) == 0]
        minus = [r for r in rays if dot(f, r) < 0]
        if not minus:
            inserted.append(tuple(f))
            rays = plus + zero
            continue
        new_rays = plus + zero
        for rp in plus:
            tp = set(k for k, v in enumerate(values(rp)) if v == 0)
            for rm in minus:
                tm = set(k for k, v in enumerate(values(rm)) if v == 0)
                common = tp & tm
                # Combinatorial adjacency: no third ray is tight on all of it.
                adjacent = True
                for other in rays:
                    if other is rp or other is rm:
                        continue
                    to = set(k for k, v in enumerate(values(other)) if v == 0)
                    if common <= to:
                        adjacent = False
                        break
                if adjacent:
                    vp, vm = dot(f, rp), dot(f, rm)
                    combo = tuple(vp * b - vm * a for a, b in zip(rp, rm))
                    new_rays.append(combo)
        inserted.append(tuple(f))
        rays = new_rays
    out = sorted({_primitive_fraction_vector(r) for r in rays if any(r)})
    if lines:
        raise ValueError("cone has a nontrivial lineality space; no extreme rays")
    return tuple(out)


def cpl_cone(space: ClassSpace, fan: Fan) -> tuple[PolyCone, tuple[CurveFunctional, ...]]:
    """The GKZ cone of a complete simplicial fan inside W, with its walls.

    cpl = {w : wall functional >= 0 for every wall}; it equals the nef cone
    of the toric variety and is full-dimensional exactly when the fan is
    projective.
    """
    functionals = tuple(wall_curve_class(space, fan, wt) for wt in walls(fan))
    distinct = [k for k, _ in dedupe_covectors(functionals)]
    cone = PolyCone(space.dim, distinct)
    return cone, functionals
