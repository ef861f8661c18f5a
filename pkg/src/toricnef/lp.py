"""Exact rational linear programming via a dense two-phase simplex.

The tableau is kept integral with one shared denominator, updated by
fraction-free (Bareiss-style) pivoting: every entry is a minor of the
original constraint matrix, so sizes stay polynomial and no rational
reductions are needed. The entering rule is Dantzig's with a fallback to
Bland's rule after a pivot budget, which keeps the solver both fast and
provably terminating. Everything is exact; no floating point anywhere.

Variables are free (unrestricted sign); internally each is split into a
difference of two nonnegative ones.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

LE, GE, EQ = "<=", ">=", "=="


def _exact_div(x: int, d: int) -> int:
    q, r = divmod(x, d)
    assert r == 0, "fraction-free pivot lost exactness"
    return q


class SimplexResult:
    def __init__(self, status: str, x=None, value=None):
        self.status = status
        self.x = x
        self.value = value

    def __repr__(self):
        return f"SimplexResult({self.status!r}, value={self.value})"


class _Tableau:
    """Integer tableau T with shared denominator d; true tableau is T/d.

    Constraint rows come first, then any number of objective rows; pivots
    update everything in one pass. Basic columns carry coefficient d in
    their row and 0 elsewhere (among constraint rows).
    """

    def __init__(self, rows: list[list[int]], basis: list[int], nobj: int):
        self.rows = rows
        self.basis = basis
        self.m = len(rows) - nobj
        self.denom = 1

    def pivot(self, prow: int, pcol: int) -> None:
        piv_row = self.rows[prow]
        piv = piv_row[pcol]
        assert piv > 0
        d = self.denom
        for i, row in enumerate(self.rows):
            if i == prow:
                continue
            f = row[pcol]
            if f == 0:
                if piv != d:
                    self.rows[i] = [_exact_div(piv * a, d) for a in row]
                continue
            self.rows[i] = [_exact_div(piv * a - f * b, d) for a, b in zip(row, piv_row)]
        self.denom = piv
        self.basis[prow] = pcol

    def basic_value(self, i: int) -> Fraction:
        return Fraction(self.rows[i][-1], self.denom)

    def optimize(self, objrow: int, allowed: Sequence[int]) -> str:
        """Run simplex steps until the given objective row is optimal."""
        pivots = 0
        bland_after = 50 * (self.m + 10)
        while True:
            obj = self.rows[objrow]
            if pivots < bland_after:
                enter, best = None, 0
                for j in allowed:
                    if obj[j] < best:
                        enter, best = j, obj[j]
            else:
                enter = next((j for j in allowed if obj[j] < 0), None)
            if enter is None:
                return "optimal"
            prow, best_r = None, None
            for i in range(self.m):
                a = self.rows[i][enter]
                if a > 0:
                    r = (self.rows[i][-1], a)
                    if (
                        best_r is None
                        or r[0] * best_r[1] < best_r[0] * r[1]
                        or (r[0] * best_r[1] == best_r[0] * r[1] and self.basis[i] < self.basis[prow])
                    ):
                        best_r, prow = r, i
            if prow is None:
                return "unbounded"
            self.pivot(prow, enter)
            pivots += 1


def maximize(objective: Sequence, constraints: Sequence[tuple[Sequence, str, object]]) -> SimplexResult:
    """Maximize objective·x subject to (coeffs, rel, rhs) constraints, x free.

    Returns status 'optimal' (with exact rational optimizer and optimum),
    'infeasible', or 'unbounded'.
    """
    nfree = len(objective)

    def clear_denoms(vec):
        vec = [Fraction(v) for v in vec]
        denom = 1
        for v in vec:
            denom = denom * v.denominator // gcd(denom, v.denominator)
        return [int(v * denom) for v in vec]

    prepared = []
    for coeffs, rel, rhs in constraints:
        vec = clear_denoms(list(coeffs) + [rhs])
        row, b = vec[:-1], vec[-1]
        if b < 0 or (b == 0 and rel == GE):
            row, b, rel = [-x for x in row], -b, {LE: GE, GE: LE, EQ: EQ}[rel]
        split = []
        for c in row:
            split.extend((c, -c))
        prepared.append((split, rel, b))

    n = 2 * nfree
    nslack = sum(1 for _, rel, _ in prepared if rel != EQ)
    nart = sum(1 for _, rel, _ in prepared if rel != LE)
    total = n + nslack + nart
    rows, basis = [], []
    si, ai = 0, 0
    for split, rel, b in prepared:
        row = split + [0] * (nslack + nart) + [b]
        if rel == LE:
            row[n + si] = 1
            basis.append(n + si)
            si += 1
        elif rel == GE:
            row[n + si] = -1
            row[n + nslack + ai] = 1
            basis.append(n + nslack + ai)
            si += 1
            ai += 1
        else:
            row[n + nslack + ai] = 1
            basis.append(n + nslack + ai)
            ai += 1
        rows.append(row)

    m = len(rows)
    art_start = n + nslack

    # Objective rows, stored negated so "entry < 0" means improving column.
    real_obj = [0] * (total + 1)
    for j, c in enumerate(clear_denoms(objective)):
        real_obj[2 * j] = -c
        real_obj[2 * j + 1] = c
    phase_obj = [0] * (total + 1)
    for j in range(art_start, total):
        phase_obj[j] = 1
    rows.append(real_obj)
    rows.append(phase_obj)
    tab = _Tableau(rows, basis, nobj=2)

    if nart:
        # Eliminate the initially-basic artificials from the phase-1 row.
        for i in range(m):
            b = basis[i]
            if b >= art_start and tab.rows[-1][b]:
                f = tab.rows[-1][b]
                piv = tab.rows[i][b]
                tab.rows[-1] = [
                    _exact_div(piv * a - f * c, tab.denom)
                    for a, c in zip(tab.rows[-1], tab.rows[i])
                ]
        status = tab.optimize(objrow=m + 1, allowed=range(total))
        if status != "optimal":
            return SimplexResult("infeasible")
        if any(basis[i] >= art_start and tab.rows[i][-1] != 0 for i in range(m)):
            return SimplexResult("infeasible")
        # Pivot zero-valued artificials out; rows with no eligible column are
        # redundant equalities and are neutralized by zeroing them out.
        for i in range(m):
            if basis[i] >= art_start:
                col = next(
                    (j for j in range(art_start) if tab.rows[i][j] != 0),
                    None,
                )
                if col is None:
                    continue  # redundant row; harmless since rhs stays 0
                if tab.rows[i][col] < 0:
                    tab.rows[i] = [-x for x in tab.rows[i]]
                tab.pivot(i, col)

    status = tab.optimize(objrow=m, allowed=range(art_start))
    if status == "unbounded":
        return SimplexResult("unbounded")

    xs = [Fraction(0)] * total
    for i in range(m):
        if basis[i] < total and (basis[i] < art_start or tab.rows[i][-1] == 0):
            xs[basis[i]] = tab.basic_value(i)
    x = tuple(xs[2 * j] - xs[2 * j + 1] for j in range(nfree))
    value = sum(Fraction(c) * xi for c, xi in zip(objective, x))
    return SimplexResult("optimal", x, value)


def feasible_point(constraints: Sequence[tuple[Sequence, str, object]], nvars: int) -> Optional[tuple[Fraction, ...]]:
    """An exact point satisfying the constraints, or None."""
    res = maximize([0] * nvars, constraints)
    return res.x if res.status == "optimal" else None


def nonneg_solve(a_cols: list[list], b: list) -> tuple[bool, tuple[Fraction, ...]]:
    """Solve A·λ = b with λ >= 0, A given by columns.

    Returns (True, λ) when solvable. Otherwise returns (False, y) with a
    Farkas certificate y: yᵀA <= 0 columnwise and yᵀb > 0.
    """
    nrows = len(b)
    ncols = len(a_cols)
    rows = []
    scale = []  # stored row i equals scale[i] * (original row i)
    for i in range(nrows):
        row = [Fraction(col[i]) for col in a_cols] + [Fraction(b[i])]
        denom = 1
        for v in row:
            denom = denom * v.denominator // gcd(denom, v.denominator)
        irow = [int(v * denom) for v in row]
        if irow[-1] < 0:
            irow = [-x for x in irow]
            denom = -denom
        rows.append(irow)
        scale.append(Fraction(denom))

    total = ncols + nrows  # λ columns then one artificial per row
    tableau = []
    basis = []
    for i, irow in enumerate(rows):
        full = irow[:-1] + [0] * nrows + [irow[-1]]
        full[ncols + i] = 1
        tableau.append(full)
        basis.append(ncols + i)
    obj = [0] * (total + 1)
    for j in range(ncols, total):
        obj[j] = 1  # negated-min convention: entry < 0 would mean improving
    tab = _Tableau(tableau + [obj], list(basis), nobj=1)
    # Eliminate initial basic artificials from the objective row.
    for i in range(nrows):
        f = tab.rows[-1][ncols + i]
        if f:
            piv = tab.rows[i][ncols + i]
            tab.rows[-1] = [
                _exact_div(piv * a - f * c, tab.denom)
                for a, c in zip(tab.rows[-1], tab.rows[i])
            ]
    status = tab.optimize(objrow=nrows, allowed=range(ncols))
    assert status == "optimal"  # phase-1 objective is bounded below by 0
    residual = sum(
        (tab.basic_value(i) for i in range(nrows) if tab.basis[i] >= ncols), Fraction(0)
    )
    if residual == 0:
        lam = [Fraction(0)] * ncols
        for i in range(nrows):
            if tab.basis[i] < ncols:
                lam[tab.basis[i]] = tab.basic_value(i)
        return True, tuple(lam)
    # Infeasible: recover the simplex multipliers y of the scaled system from
    # Bᵀ y = c_B (costs 1 on basic artificials, 0 on basic λ columns), then
    # translate back to the original rows through the stored scales.
    from .intlinalg import solve_rational

    bt = []
    cb = []
    for i in range(nrows):
        bcol = tab.basis[i]
        if bcol < ncols:
            bt.append([rows[k][bcol] for k in range(nrows)])
            cb.append(0)
        else:
            unit = [0] * nrows
            unit[bcol - ncols] = 1
            bt.append(unit)
            cb.append(1)
    y_scaled = solve_rational(tuple(tuple(r) for r in bt), cb)
    assert y_scaled is not None
    return False, tuple(v * s for v, s in zip(y_scaled, scale))


def cone_interior_point(functionals: Sequence[Sequence], nvars: int,
                        equalities: Sequence[Sequence] = ()) -> Optional[tuple[Fraction, ...]]:
    """Exact w with f·w >= 1 for every functional and e·w = 0 for every equality.

    Returns None when no such point exists (the cone section is not
    full-dimensional in the equality subspace). This is the workhorse for
    full-dimensionality tests and relative interior points: it solves the
    small Farkas-dual system, whose infeasibility certificate is exactly the
    sought interior point.
    """
    cols: list[list] = [list(f) + [1] for f in functionals]
    for e in equalities:
        cols.append(list(e) + [0])
        cols.append([-x for x in e] + [0])
    b = [0] * nvars + [1]
    solvable, cert = nonneg_solve(cols, b)
    if solvable:
        return None
    w, t = cert[:nvars], cert[-1]
    assert t > 0
    point = tuple(-wi / t for wi in w)
    for f in functionals:
        assert sum(Fraction(c) * x for c, x in zip(f, point)) >= 1
    for e in equalities:
        assert sum(Fraction(c) * x for c, x in zip(e, point)) == 0
    return point
