"""Linear circuits among fan rays, the supportedness test, and Flip_S.

A circuit is a minimally linearly dependent set of rays; its unique
primitive relation splits the set into positive and negative parts. When a
circuit is supported on a fan, the cones built on one side can be traded
for cones built on the other, which is a divisorial contraction when the
disappearing side is a single ray and a generalized flop otherwise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .fan import Fan
from .intlinalg import (
    Vector,
    as_matrix,
    hnf_basis,
    integer_kernel,
    transpose,
)


@dataclass(frozen=True)
class Circuit:
    """Ray-index set with its primitive relation sum(coeff_i * ray_i) = 0."""

    rays: tuple[int, ...]
    coefficients: tuple[int, ...]

    @property
    def positive(self) -> tuple[int, ...]:
        return tuple(r for r, c in zip(self.rays, self.coefficients) if c > 0)

    @property
    def negative(self) -> tuple[int, ...]:
        return tuple(r for r, c in zip(self.rays, self.coefficients) if c < 0)

    def flipped(self) -> "Circuit":
        return Circuit(self.rays, tuple(-c for c in self.coefficients))

    def canonical(self) -> "Circuit":
        """Orientation with the smaller negative part; ties keep the smallest
        ray index on the negative side."""
        neg, pos = len(self.negative), len(self.positive)
        if neg < pos:
            return self
        if pos < neg:
            return self.flipped()
        return self if self.rays[0] in self.negative else self.flipped()

    def coefficient_of(self, ray: int) -> int:
        for r, c in zip(self.rays, self.coefficients):
            if r == ray:
                return c
        return 0

    def to_json(self) -> str:
        return json.dumps({"rays": list(self.rays), "coeffs": list(self.coefficients)})

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        d = json.loads(text)
        return cls(tuple(d["rays"]), tuple(d["coeffs"]))


def circuit_from_rays(fan: Fan, ray_indices: Sequence[int]) -> Optional[Circuit]:
    """The circuit on the given rays, or None if they are not one."""
    idxs = tuple(sorted(ray_indices))
    kernel = integer_kernel(transpose(as_matrix([fan.rays[i] for i in idxs])))
    if len(kernel) != 1 or any(c == 0 for c in kernel[0]):
        return None
    return Circuit(idxs, kernel[0]).canonical()


def find_circuits(fan: Fan, max_size: Optional[int] = None) -> tuple[Circuit, ...]:
    """All circuits among the fan's rays up to the size bound.

    Depth-first over independent prefixes: every proper subset of a circuit
    is independent, so subsets with dependent prefixes are pruned early.
    """
    bound = max_size if max_size is not None else fan.rank + 1
    n = len(fan.rays)
    out: list[Circuit] = []

    def extend(prefix: list[int], start: int):
        if len(prefix) >= bound:
            return
        for i in range(start, n):
            candidate = prefix + [i]
            rank = len(hnf_basis([fan.rays[j] for j in candidate]))
            if rank == len(candidate):
                extend(candidate, i + 1)
            elif rank == len(candidate) - 1:
                c = circuit_from_rays(fan, candidate)
                if c is not None:
                    out.append(c)

    extend([], 0)
    return tuple(sorted(out, key=lambda c: (len(c.rays), c.rays)))


@dataclass(frozen=True)
class SupportWitness:
    supported: bool
    reason: str
    top_cones: tuple[tuple[int, ...], ...] = ()
    extensions: tuple[tuple[int, ...], ...] = ()


def is_supported(circuit: Circuit, fan: Fan) -> SupportWitness:
    """The two-part supportedness test, with the extension sets as witness.

    Part one: every cone spanned by the circuit minus one positive element
    lies in the fan. Part two: all those top cones extend to maximal cones
    of the fan by exactly the same ray sets.
    """
    all_cones = set(fan.all_cones)
    tops = []
    for n_i in circuit.positive:
        top = tuple(sorted(r for r in circuit.rays if r != n_i))
        if top not in all_cones:
            return SupportWitness(False, f"cone {top} missing from the fan")
        tops.append(top)
    ext_sets = []
    for top in tops:
        exts = {
            tuple(sorted(set(c) - set(top)))
            for c in fan.max_cones
            if set(top) <= set(c)
        }
        ext_sets.append(exts)
    common = ext_sets[0]
    for e in ext_sets[1:]:
        if e != common:
            return SupportWitness(False, "extension sets differ between top cones")
    return SupportWitness(True, "supported", tuple(tops), tuple(sorted(common)))


@dataclass(frozen=True)
class FlipResult:
    fan: Fan
    circuit: Circuit
    kind: str                             # "divisorial-contraction" | "generalized-flop"
    removed_max: tuple[tuple[Vector, ...], ...]
    inserted_max: tuple[tuple[Vector, ...], ...]
    removed_ray: Optional[Vector]
    extensions: tuple[tuple[int, ...], ...]


def flip(fan: Fan, circuit: Circuit) -> FlipResult:
    """Replace the cones built on the positive side of a supported circuit
    by cones built on the negative side.

    The result keeps the surviving rays in their original order; for a
    divisorial flip (one negative ray) the disappearing ray is dropped from
    the ray list.
    """
    if not circuit.positive or not circuit.negative:
        raise ValueError("flip needs both sign parts nonempty")
    witness = is_supported(circuit, fan)
    if not witness.supported:
        raise ValueError(f"circuit {circuit.rays} not supported: {witness.reason}")
    removed = set()
    for n_i in circuit.positive:
        top = tuple(sorted(r for r in circuit.rays if r != n_i))
        for ext in witness.extensions:
            cone = tuple(sorted(set(top) | set(ext)))
            if cone in fan.max_cones:
                removed.add(cone)
    inserted = set()
    for n_i in circuit.negative:
        top = tuple(sorted(r for r in circuit.rays if r != n_i))
        for ext in witness.extensions:
            inserted.add(tuple(sorted(set(top) | set(ext))))
    new_cones = [c for c in fan.max_cones if c not in removed] + sorted(inserted)
    used = sorted({i for c in new_cones for i in c})
    kind = "divisorial-contraction" if len(circuit.negative) == 1 else "generalized-flop"
    removed_ray = None
    if len(used) < len(fan.rays):
        gone = [i for i in range(len(fan.rays)) if i not in set(used)]
        if kind != "divisorial-contraction" or gone != [circuit.negative[0]]:
            raise ValueError(f"flip of {circuit.rays} dropped unexpected rays {gone}")
        removed_ray = fan.rays[gone[0]]
    remap = {old: new for new, old in enumerate(used)}
    out = Fan(
        tuple(fan.rays[i] for i in used),
        tuple(tuple(sorted(remap[i] for i in c)) for c in new_cones),
    )
    from .fan import walls

    walls(out)  # raises when the exchange broke the fan
    to_vectors = lambda cones: tuple(
        tuple(fan.rays[i] for i in c) for c in sorted(cones)
    )
    return FlipResult(
        out, circuit, kind, to_vectors(removed), to_vectors(inserted), removed_ray,
        witness.extensions,
    )


def pullback_classes(space, result: FlipResult):
    """The injection of class spaces W' -> W along a divisorial contraction.

    A divisor class on the contracted variety pulls back by reading the
    removed ray's coefficient off the cone of the new fan containing it;
    returns the matrix columns (images of the W' basis classes) as
    W-coordinate vectors.
    """
    from .classgroup import class_space

    if result.kind != "divisorial-contraction":
        raise ValueError("pullback_classes needs a divisorial contraction")
    new_fan = result.fan
    q = result.removed_ray
    carrier = next(c for c in new_fan.max_cones if new_fan.cone_contains(c, q))
    lam = new_fan.cone_coefficients(carrier, q)
    new_space = class_space(new_fan)
    old_ray_index = {r: i for i, r in enumerate(space.rays)}
    cols = []
    for j in new_space.free:
        unit = [Fraction(0)] * len(new_fan.rays)
        unit[j] = Fraction(1)
        a = [Fraction(0)] * len(space.rays)
        for i, r in enumerate(new_fan.rays):
            a[old_ray_index[r]] = unit[i]
        a[old_ray_index[q]] = sum(l * unit[carrier[k]] for k, l in enumerate(lam))
        cols.append(space.project(a))
    return new_space, tuple(cols)
