"""Dense two-phase simplex method for the small linear programs used here.

Every LP in this package has at most a few dozen rows (facet systems with
m <= ~60 after intersections, n <= 9 variables), so a dense tableau with
deterministic pivoting is both fast and, more importantly for replayable
runs, bit-stable: identical inputs give identical pivots and identical
optima.  The entering rule is largest-coefficient with lowest-index ties;
after a generous iteration budget the solver falls back to Bland's rule,
which cannot cycle.
"""

from __future__ import annotations

import numpy as np

__all__ = ["LPError", "LPInfeasible", "LPUnbounded", "solve_lp"]

_PIVOT_TOL = 1e-11
_FEAS_TOL = 1e-9
_DANTZIG_ITERS = 5000
_MAX_ITERS = 50000


class LPError(Exception):
    """Numerical failure inside the simplex method."""


class LPInfeasible(LPError):
    """The constraint system A x <= b has no solution."""


class LPUnbounded(LPError):
    """The objective is unbounded over the feasible region."""


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    piv = T[:, col].copy()
    piv[row] = 0.0
    T -= np.outer(piv, T[row])
    basis[row] = col


def _run(T, basis, allowed):
    """Drive the tableau to optimality.  Objective row is T[-1] (maximize)."""
    it = 0
    while True:
        costs = T[-1, :-1]
        if it < _DANTZIG_ITERS:
            cand = np.where(allowed & (costs > _PIVOT_TOL))[0]
            if cand.size == 0:
                return
            col = cand[np.argmax(costs[cand])]
        else:
            # Bland: first improving column, first eligible row by basis index.
            cand = np.where(allowed & (costs > _PIVOT_TOL))[0]
            if cand.size == 0:
                return
            col = cand[0]
        az = T[:-1, col]
        pos = np.where(az > _PIVOT_TOL)[0]
        if pos.size == 0:
            raise LPUnbounded("objective unbounded over the feasible region")
        ratios = T[pos, -1] / az[pos]
        best = np.min(ratios)
        tied = pos[ratios <= best + _PIVOT_TOL]
        if it < _DANTZIG_ITERS:
            row = tied[0]
        else:
            row = tied[np.argmin(basis[tied])]
        _pivot(T, basis, row, col)
        it += 1
        if it > _MAX_ITERS:
            raise LPError("simplex iteration limit exceeded")


def _solve_standard(c, A, b):
    """max <c,z> s.t. A z <= b, z >= 0.  Returns (z, value)."""
    m, k = A.shape
    neg = b < 0
    n_art = int(np.count_nonzero(neg))

    # Columns: k structural, m slacks, n_art artificials, then RHS.
    ncols = k + m + n_art
    T = np.zeros((m + 1, ncols + 1))
    T[:m, :k] = A
    T[:m, k : k + m] = np.eye(m)
    T[:m, -1] = b
    rows_neg = np.where(neg)[0]
    T[rows_neg] *= -1.0
    art_cols = np.arange(k + m, k + m + n_art)
    for j, i in zip(art_cols, rows_neg):
        T[i, j] = 1.0
    basis = (k + np.arange(m)).astype(int)
    basis[rows_neg] = art_cols

    allowed = np.ones(ncols, dtype=bool)
    if n_art:
        # Phase 1: maximize -sum(artificials); price out the basic artificials.
        T[-1, art_cols] = -1.0
        for i in rows_neg:
            T[-1] += T[i]
        _run(T, basis, allowed)
        # The tableau carries minus the running objective in its corner, so a
        # positive corner value means the artificials could not be driven to 0.
        if T[-1, -1] > _FEAS_TOL:
            raise LPInfeasible("phase-1 optimum nonzero: system infeasible")
        # Drive any zero-level artificial out of the basis.
        for i in range(m):
            if basis[i] >= k + m:
                cols = np.where(np.abs(T[i, : k + m]) > _PIVOT_TOL)[0]
                if cols.size:
                    _pivot(T, basis, i, cols[0])
        allowed[art_cols] = False
        T[:, art_cols] = 0.0
        T[-1] = 0.0

    # Phase 2 objective, priced out over the current basis.
    T[-1, :k] = c
    for i in range(m):
        if basis[i] < k + m:
            T[-1] -= T[-1, basis[i]] * T[i]
    _run(T, basis, allowed)

    z = np.zeros(ncols)
    z[basis] = T[:m, -1]
    return z[:k], float(np.dot(c, z[:k]))


def solve_lp(c, A, b, maximize=True):
    """Solve max (or min) <c, x> subject to A x <= b with x free.

    Free variables are split into positive and negative parts internally.
    Returns (x, value); raises LPInfeasible or LPUnbounded.
    """
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    if A.shape[0] != b.shape[0] or A.shape[1] != c.shape[0]:
        raise ValueError("inconsistent LP dimensions")
    sign = 1.0 if maximize else -1.0
    cc = np.concatenate([sign * c, -sign * c])
    AA = np.concatenate([A, -A], axis=1)
    z, val = _solve_standard(cc, AA, b)
    n = c.shape[0]
    x = z[:n] - z[n:]
    return x, sign * val
