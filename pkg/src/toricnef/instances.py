"""Built-in problem instances and their ground-truth coordinate fixtures.

The main instance is the quintic quotient P^4/H with H of order 25; the two
control instances (plain P^4 and P^1 x P^3) exist to make sure the pipeline
does not produce strict-inclusion witnesses vacuously.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .quotient import DiagonalAction

# Weights of the two generators of H on the torus chart z0 = 1, mod 5.
QUINTIC_GROUP_ORDER = 5
QUINTIC_WEIGHTS = ((1, 2, 3, 4), (1, 3, 1, 0))

# The four points of the ambient character lattice used as the reference
# basis for the invariant sublattice M (rows, chart coordinates).
QUINTIC_M_BASIS = ((4, -1, -1, -1), (1, -1, 2, 0), (-1, -1, 4, -1), (-1, -1, -1, 4))

# Vertices of the big polytope of P^4 in the chart coordinates.
P4_BIG_POLYTOPE = (
    (-1, -1, -1, -1),
    (4, -1, -1, -1),
    (-1, 4, -1, -1),
    (-1, -1, 4, -1),
    (-1, -1, -1, 4),
)

# Vertices of the quotient polytope in M-basis coordinates.
QUINTIC_DELTA_VERTICES = (
    (1, 0, 0, 0),
    (-3, 5, -4, -2),
    (0, 0, 1, 0),
    (0, 0, 0, 1),
    (2, -5, 3, 1),
)

# Ground truth for the dual polytope: its five vertices ...
D_VERTICES = (
    (-1, -2, -1, -1),  # D0
    (4, 1, -1, -1),    # D1
    (-1, -1, -1, -1),  # D2
    (-1, 2, 4, -1),    # D3
    (-1, 0, -1, 4),    # D4
)

# ... and the twenty lattice points interior to its ten triangular 2-faces,
# two per face, with the face each pair lies on (indices into D_VERTICES).
P_POINTS = (
    (2, 0, -1, -1),    # P1
    (0, 1, 2, -1),     # P2
    (0, -1, -1, 0),    # P3
    (-1, -1, 0, -1),   # P4
    (-1, -1, -1, 0),   # P5
    (-1, 0, 0, 2),     # P6
    (0, 0, 0, -1),     # P7
    (0, 0, -1, 2),     # P8
    (2, 1, 0, 0),      # P9
    (-1, 1, 2, 0),     # P10
)
Q_POINTS = (
    (0, -1, -1, -1),   # Q1
    (1, 0, 0, -1),     # Q2
    (1, 0, -1, 1),     # Q3
    (-1, 0, 1, -1),    # Q4
    (-1, -1, -1, 1),   # Q5
    (-1, 0, 1, 0),     # Q6
    (1, 1, 1, -1),     # Q7
    (1, 0, -1, 0),     # Q8
    (0, 1, 1, 1),      # Q9
    (-1, 0, 0, 1),     # Q10
)
PQ_CARRIER_FACES = (
    (0, 1, 2), (0, 1, 3), (0, 1, 4), (0, 2, 3), (0, 2, 4),
    (0, 3, 4), (1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4),
)

# Global ray order for the quintic instance: D0..D4, P1..P10, Q1..Q10.
QUINTIC_RAY_ORDER = D_VERTICES + P_POINTS + Q_POINTS


def ray_index(name: str) -> int:
    """Index of a named ray (e.g. 'D2', 'P10', 'Q7') in the global order."""
    kind, num = name[0], int(name[1:])
    if kind == "D":
        return num
    if kind == "P":
        return 4 + num
    if kind == "Q":
        return 14 + num
    raise ValueError(f"unknown ray name {name!r}")


def ray_name(idx: int) -> str:
    if idx < 5:
        return f"D{idx}"
    if idx < 15:
        return f"P{idx - 4}"
    if idx < 25:
        return f"Q{idx - 14}"
    raise ValueError(f"ray index {idx} out of range")


# The Theorem's fan hypothesis: six tetrahedra that must be maximal cones.
THEOREM_TETRAHEDRA = (
    ("D2", "P10", "Q10", "P6"),
    ("D2", "D4", "Q10", "P6"),
    ("D4", "P10", "Q10", "P6"),
    ("D2", "P10", "Q10", "P7"),
    ("D2", "D4", "Q10", "P7"),
    ("D4", "P10", "Q10", "P7"),
)

# The two circuits of the Theorem with their primitive relations
# (signs fixed by the negative Q10 coefficient).
CIRCUIT_S1 = (("D2", "D4", "P10", "Q10"), (1, 1, 1, -3))
CIRCUIT_S2 = (("P6", "P7", "Q10"), (1, 1, -1))

# Standard product fans used as oracles and control instances.
P1XP2_RAYS = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, 0, 1), (0, -1, -1))
P1XP2_MAX_CONES = (
    (0, 2, 3), (0, 2, 4), (0, 3, 4),
    (1, 2, 3), (1, 2, 4), (1, 3, 4),
)

P1XP3_DUAL_VERTICES = (
    (1, 0, 0, 0), (-1, 0, 0, 0),
    (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (0, -1, -1, -1),
)


@dataclass(frozen=True)
class Instance:
    """A pipeline input: either a diagonal quotient of P^4 or a direct dual polytope."""

    name: str
    action: Optional[DiagonalAction] = None
    dual_vertices: Optional[tuple[tuple[int, ...], ...]] = None
    ray_order: Optional[tuple[tuple[int, ...], ...]] = None


def builtin_instance(name: str) -> Instance:
    if name == "quintic-quotient":
        return Instance(
            name,
            action=DiagonalAction(QUINTIC_GROUP_ORDER, QUINTIC_WEIGHTS),
            ray_order=QUINTIC_RAY_ORDER,
        )
    if name == "p4":
        return Instance(name, action=DiagonalAction(QUINTIC_GROUP_ORDER, ()))
    if name == "p1xp3":
        return Instance(name, dual_vertices=P1XP3_DUAL_VERTICES)
    raise ValueError(f"unknown instance {name!r}; options: quintic-quotient, p4, p1xp3")
