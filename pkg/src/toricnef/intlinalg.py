"""Exact integer matrix arithmetic with lattice normal forms.

Matrices are immutable tuples of tuples of Python ints, so every operation
is overflow-free and safe to share between workers. The three workhorses are
row Hermite normal form (with its unimodular transform), Smith normal form,
and saturated integer kernels; everything downstream (sublattices, fans,
Gale data) reduces to these.

All pivot choices are fixed (smallest absolute value, ties by row order), so
identical inputs always produce bit-identical outputs.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

Matrix = tuple[tuple[int, ...], ...]
Vector = tuple[int, ...]


def as_matrix(rows: Sequence[Sequence[int]]) -> Matrix:
    """Validate and freeze a rectangular integer matrix."""
    out = tuple(tuple(int(x) for x in row) for row in rows)
    if out:
        width = len(out[0])
        if any(len(row) != width for row in out):
            raise ValueError("ragged rows in matrix input")
    return out


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(rows: int, cols: int) -> Matrix:
    return tuple((0,) * cols for _ in range(rows))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_vec(a: Matrix, v: Sequence[int]) -> Vector:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def vec_sub(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(x - y for x, y in zip(u, v))


def vec_add(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(x + y for x, y in zip(u, v))


def vec_scale(c: int, v: Sequence[int]) -> Vector:
    return tuple(c * x for x in v)


def dot(u: Sequence, v: Sequence):
    return sum(x * y for x, y in zip(u, v))


def gcd_vector(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def primitive(v: Sequence[int]) -> Vector:
    """Divide a nonzero integer vector by the gcd of its entries."""
    g = gcd_vector(v)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(x // g for x in v)


def det(a: Matrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    if n == 0:
        return 1
    if any(len(row) != n for row in a):
        raise ValueError("determinant of a non-square matrix")
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            pivot_row = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if pivot_row is None:
                return 0
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _pivot_row(rows: list[list[int]], start: int, col: int) -> Optional[int]:
    # Smallest absolute value wins; ties resolved by row order.
    best = None
    best_abs = None
    for i in range(start, len(rows)):
        x = rows[i][col]
        if x != 0 and (best is None or abs(x) < best_abs):
            best, best_abs = i, abs(x)
    return best


def hnf(a: Matrix) -> tuple[Matrix, Matrix]:
    """Row Hermite normal form.

    Returns (H, U) with U unimodular, U*a = H, H upper echelon with positive
    pivots and entries above each pivot reduced into [0, pivot). Zero rows
    sink to the bottom.
    """
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    h = [list(row) for row in a]
    u = [list(row) for row in identity(nrows)]
    r = 0
    pivots: list[tuple[int, int]] = []
    for c in range(ncols):
        if r >= nrows:
            break
        # Clear the column below row r with gcd-style row reductions.
        while True:
            p = _pivot_row(h, r, c)
            if p is None:
                break
            if p != r:
                h[r], h[p] = h[p], h[r]
                u[r], u[p] = u[p], u[r]
            done = True
            for i in range(r + 1, nrows):
                if h[i][c] != 0:
                    q = h[i][c] // h[r][c]
                    h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                    if h[i][c] != 0:
                        done = False
            if done:
                break
        if r < nrows and h[r][c] != 0:
            if h[r][c] < 0:
                h[r] = [-x for x in h[r]]
                u[r] = [-x for x in u[r]]
            pivots.append((r, c))
            r += 1
    # Reduce entries above each pivot.
    for r, c in pivots:
        for i in range(r):
            q = h[i][c] // h[r][c]
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
    return tuple(tuple(row) for row in h), tuple(tuple(row) for row in u)


def hnf_basis(rows: Sequence[Sequence[int]]) -> Matrix:
    """Canonical form of the lattice spanned by the given rows: HNF, zero rows dropped."""
    if not rows:
        return ()
    h, _ = hnf(as_matrix(rows))
    return tuple(row for row in h if any(row))


def rank(a: Matrix) -> int:
    return len(hnf_basis(a))


def snf(a: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form.

    Returns (D, U, V) with U, V unimodular, U*a*V = D, D diagonal with
    nonnegative entries and d1 | d2 | ... .
    """
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    m = [list(row) for row in a]
    u = [list(row) for row in identity(nrows)]
    v = [list(row) for row in identity(ncols)]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        m[dst] = [x - q * y for x, y in zip(m[dst], m[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for row in m:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    t = 0
    while t < min(nrows, ncols):
        # Locate the smallest nonzero entry in the trailing block.
        pivot = None
        best = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                x = m[i][j]
                if x != 0 and (best is None or abs(x) < best):
                    pivot, best = (i, j), abs(x)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        dirty = False
        for i in range(t + 1, nrows):
            if m[i][t] != 0:
                add_row(i, t, m[i][t] // m[t][t])
                dirty = dirty or m[i][t] != 0
        for j in range(t + 1, ncols):
            if m[t][j] != 0:
                add_col(j, t, m[t][j] // m[t][t])
                dirty = dirty or m[t][j] != 0
        if dirty:
            continue
        # Pivot must divide every entry of the remaining block.
        offender = next(
            ((i, j) for i in range(t + 1, nrows) for j in range(t + 1, ncols)
             if m[i][j] % m[t][t] != 0),
            None,
        )
        if offender is not None:
            add_row(t, offender[0], -1)
            continue
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return tuple(tuple(r) for r in m), tuple(tuple(r) for r in u), tuple(tuple(r) for r in v)


def elementary_divisors(a: Matrix) -> tuple[int, ...]:
    """Nonzero diagonal of the Smith form."""
    d, _, _ = snf(a)
    return tuple(d[i][i] for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i] != 0)


def integer_kernel(a: Matrix) -> Matrix:
    """Basis of the saturated kernel lattice {x : a·x = 0}, rows in HNF form.

    The kernel is extracted from the unimodular transform of hnf(aᵀ): rows of
    U mapping to zero rows of H form a basis of the full kernel sublattice,
    which is saturated because U is a basis of the ambient lattice.
    """
    if not a:
        return ()
    at = transpose(a)
    h, u = hnf(at)
    kernel_rows = [u[i] for i in range(len(h)) if not any(h[i])]
    return hnf_basis(kernel_rows)


def solve_rational(a: Matrix, b: Sequence) -> Optional[tuple[Fraction, ...]]:
    """Solve a·x = b exactly over the rationals; None if inconsistent.

    When the solution space is positive-dimensional the free variables are
    set to zero, so the answer is deterministic.
    """
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    m = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(a, b)]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if m[i][ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for row_idx, c in enumerate(pivots):
        x[c] = m[row_idx][ncols]
    return tuple(x)


def solve_integer(a: Matrix, b: Sequence[int]) -> Optional[Vector]:
    """One integer solution of a·x = b, or None if no integral solution exists.

    Uses the Smith form: with U a V = D the system is solvable over the
    integers iff each (U b)_i is divisible by d_i (and zero past the rank).
    """
    if not a:
        return ()
    d, u, v = snf(a)
    ub = mat_vec(u, b)
    ncols = len(a[0])
    y = [0] * ncols
    for i in range(len(a)):
        di = d[i][i] if i < ncols else 0
        if di == 0:
            if ub[i] != 0:
                return None
        else:
            if ub[i] % di != 0:
                return None
            y[i] = ub[i] // di
    return mat_vec(v, y)


def inverse_rational(a: Matrix) -> tuple[tuple[Fraction, ...], ...]:
    """Exact inverse of a nonsingular square integer matrix."""
    n = len(a)
    cols = []
    for j in range(n):
        e = [1 if i == j else 0 for i in range(n)]
        x = solve_rational(a, e)
        if x is None:
            raise ValueError("matrix is singular")
        cols.append(x)
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def is_unimodular(a: Matrix) -> bool:
    return len(a) == (len(a[0]) if a else 0) and abs(det(a)) == 1
