"""Dense two-phase revised simplex for LPs with few rows and many columns.

Solves ``max c.x  s.t.  A x (<=, =, >=) b,  x >= 0``. The basis matrix is
re-factored from scratch at every iteration; with a dozen rows this is cheap
and keeps round-off from accumulating. Pricing scans every column, which for
the discretised radial LP is a scan over the whole frequency grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"

SENSES = ("<=", "=", ">=")


@dataclass
class SimplexResult:
    status: str
    x: np.ndarray
    objective: float
    duals: np.ndarray
    reduced_cost_max: float
    iterations: int


class _Stop(Exception):
    def __init__(self, status):
        self.status = status


def _iterate(M, b, cost, basis, allowed, tol, max_iter, counter):
    """Primal simplex iterations on the columns ``allowed``; ``basis`` is
    updated in place. Returns the final ``(xB, y, reduced_costs)``."""
    bland = False
    stalled = 0
    piv_tol = 1e-9
    while True:
        if counter[0] >= max_iter:
            raise _Stop(ITERATION_LIMIT)
        B = M[:, basis]
        xB = np.linalg.solve(B, b)
        y = np.linalg.solve(B.T, cost[basis])
        d = cost - M.T @ y
        d[~allowed] = -np.inf
        d[basis] = -np.inf
        if bland:
            candidates = np.flatnonzero(d > tol)
            if candidates.size == 0:
                break
            e = int(candidates[0])
        else:
            e = int(np.argmax(d))
            if d[e] <= tol:
                break
        u = np.linalg.solve(B, M[:, e])
        pos = u > piv_tol
        if not pos.any():
            raise _Stop(UNBOUNDED)
        ratios = np.full(len(u), np.inf)
        ratios[pos] = np.maximum(xB[pos], 0.0) / u[pos]
        theta = ratios.min()
        ties = np.flatnonzero(ratios <= theta + 1e-12 * max(1.0, theta))
        if bland:
            r = int(ties[np.argmin(basis[ties])])
        else:
            r = int(ties[np.argmax(u[ties])])
        basis[r] = e
        counter[0] += 1
        if theta * d[e] <= 1e-14:
            stalled += 1
            if stalled > 50:
                bland = True
        else:
            stalled = 0
            bland = False
    d_final = np.where(np.isfinite(d), d, 0.0)
    return xB, y, d_final


def simplex_max(c, A, senses, b, tol: float = 1e-10, max_iter: int = 20000) -> SimplexResult:
    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float, ndmin=2)
    b = np.array(b, dtype=float)
    m, n = A.shape
    senses = list(senses)
    if len(senses) != m or len(b) != m or len(c) != n:
        raise ValueError("inconsistent LP dimensions")
    for s in senses:
        if s not in SENSES:
            raise ValueError(f"unknown constraint sense {s!r}")

    # make every right-hand side nonnegative
    sign = np.where(b < 0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign
    flipped = {"<=": ">=", ">=": "<=", "=": "="}
    senses = [flipped[s] if g < 0 else s for s, g in zip(senses, sign)]

    slack_rows = [i for i, s in enumerate(senses) if s != "="]
    art_rows = [i for i, s in enumerate(senses) if s != "<="]
    S = np.zeros((m, len(slack_rows)))
    for k, i in enumerate(slack_rows):
        S[i, k] = 1.0 if senses[i] == "<=" else -1.0
    R = np.zeros((m, len(art_rows)))
    for k, i in enumerate(art_rows):
        R[i, k] = 1.0
    M = np.hstack([A, S, R])
    n_total = M.shape[1]
    art_cols = np.arange(n + len(slack_rows), n_total)

    basis = np.empty(m, dtype=np.int64)
    for k, i in enumerate(slack_rows):
        if senses[i] == "<=":
            basis[i] = n + k
    for k, i in enumerate(art_rows):
        basis[i] = art_cols[k]

    counter = [0]
    allowed = np.ones(n_total, dtype=bool)
    empty_duals = np.full(m, np.nan)
    try:
        if art_rows:
            cost1 = np.zeros(n_total)
            cost1[art_cols] = -1.0
            xB, _, _ = _iterate(M, b, cost1, basis, allowed, tol, max_iter, counter)
            infeas = float(np.sum(xB[np.isin(basis, art_cols)]))
            if infeas > 1e-9 * max(1.0, float(np.abs(b).max())):
                return SimplexResult(INFEASIBLE, np.full(n, np.nan), -np.inf,
                                     empty_duals, np.nan, counter[0])
            # pivot zero-level artificials out of the basis where possible
            keep = np.ones(m, dtype=bool)
            for r in range(m):
                if basis[r] not in art_cols:
                    continue
                row = np.linalg.solve(M[:, basis].T, np.eye(m)[r]) @ M
                row[art_cols] = 0.0
                row[basis] = 0.0
                j = int(np.argmax(np.abs(row)))
                if abs(row[j]) > 1e-8:
                    basis[r] = j
                else:
                    keep[r] = False  # redundant constraint
            allowed[art_cols] = False
            if not keep.all():
                M = M[keep]
                b = b[keep]
                basis = basis[keep]
        else:
            keep = np.ones(m, dtype=bool)
        cost2 = np.zeros(n_total)
        cost2[:n] = c
        xB, y, d = _iterate(M, b, cost2, basis, allowed, tol, max_iter, counter)
    except _Stop as stop:
        return SimplexResult(stop.status, np.full(n, np.nan), np.nan, empty_duals,
                             np.nan, counter[0])

    x_full = np.zeros(n_total)
    x_full[basis] = np.maximum(xB, 0.0)
    x = x_full[:n]
    duals = np.zeros(m)
    duals[keep] = y
    duals *= sign
    d_struct = d[:n]
    return SimplexResult(OPTIMAL, x, float(c @ x), duals,
                         float(d_struct.max()) if n else 0.0, counter[0])
