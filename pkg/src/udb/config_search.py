"""Cut generation: N-point sets that minimise the inclusion-exclusion sum.

For a radial profile ``k`` the set row of the LP reads
``sum_t k(t) sum_{pairs} Om(t |x - y|) >= m|C| - binom(m+1, 2)/delta``.
A set whose left-hand side falls below the right-hand side is a violated
cut; adding it to the LP lowers the fixed-point bound.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import PointConfig, pair_distance_array
from .lp_search import RadialProfile, config_rhs
from .special_functions import j0, j1

log = logging.getLogger(__name__)

VIOLATION_MARGIN = 1e-9
GRAD_TOL = 1e-7
MAX_ITER = 4000
INIT_RADIUS = 2.0
DUPLICATE_TOL = 1e-3


@dataclass
class SearchResult:
    config: PointConfig
    objective: float
    violated: bool
    restarts_used: int
    grad_norm: float = math.nan


def ie_objective(kappa: RadialProfile, config: PointConfig) -> float:
    d = pair_distance_array(config)
    if d.size == 0:
        return 0.0
    vals = j0(np.multiply.outer(kappa.t, d))
    return float(kappa.mass @ np.atleast_2d(vals).sum(axis=1))


def _batch_objective(kappa, free):
    """Objective and gradient for a batch of sets.

    ``free`` has shape (R, N-1, 2): the non-origin points of R sets.
    Returns ``(f, grad)`` with shapes (R,) and (R, N-1, 2).
    """
    R, k, _ = free.shape
    pts = np.concatenate([np.zeros((R, 1, 2)), free], axis=1)
    i, j = np.triu_indices(k + 1, k=1)
    diff = pts[:, i, :] - pts[:, j, :]                    # (R, P, 2)
    d = np.hypot(diff[..., 0], diff[..., 1])               # (R, P)
    u = d[..., None] * kappa.t                             # (R, P, S)
    f = (j0(u) @ kappa.mass).sum(axis=1)
    # d/dd of sum_t k(t) J0(t d) = -sum_t k(t) t J1(t d)
    df = -(j1(u) @ (kappa.mass * kappa.t))                 # (R, P)
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = np.where(d[..., None] > 0, diff / d[..., None], 0.0)
    pair_grad = df[..., None] * unit                       # d f / d p_i
    grad_all = np.zeros_like(pts)
    np.add.at(grad_all, (slice(None), i), pair_grad)
    np.add.at(grad_all, (slice(None), j), -pair_grad)
    return f, grad_all[:, 1:, :]


def ie_gradient(kappa: RadialProfile, config: PointConfig) -> np.ndarray:
    """Gradient of :func:`ie_objective` in the non-origin points (first point pinned)."""
    pts = config.points
    if len(pts) < 2:
        return np.zeros((0, 2))
    shifted = (pts[1:] - pts[0])[None]
    return _batch_objective(kappa, shifted)[1][0]


def _descend(kappa, free, max_iter=MAX_ITER, grad_tol=GRAD_TOL):
    """Batched steepest descent with Armijo backtracking, one step size per set."""
    R = free.shape[0]
    f, g = _batch_objective(kappa, free)
    step = np.ones(R)
    active = np.ones(R, dtype=bool)
    c1 = 1e-4
    for _ in range(max_iter):
        gn2 = np.einsum("rkc,rkc->r", g, g)
        active &= np.sqrt(gn2) > grad_tol
        if not active.any():
            break
        idx = np.flatnonzero(active)
        trial_step = np.minimum(step[idx] * 2.0, 1.0)
        accepted = np.zeros(idx.size, dtype=bool)
        new_x = free[idx].copy()
        new_f = f[idx].copy()
        new_g = g[idx].copy()
        for _ls in range(40):
            todo = ~accepted
            if not todo.any():
                break
            sub = idx[todo]
            cand = free[sub] - trial_step[todo, None, None] * g[sub]
            fc, gc = _batch_objective(kappa, cand)
            ok = fc <= f[sub] - c1 * trial_step[todo] * gn2[sub]
            pos = np.flatnonzero(todo)
            good = pos[ok]
            new_x[good], new_f[good], new_g[good] = cand[ok], fc[ok], gc[ok]
            accepted[good] = True
            trial_step[pos[~ok]] *= 0.5
        # sets whose line search failed are at a numerical stationary point
        active[idx[~accepted]] = False
        free[idx], f[idx], g[idx] = new_x, new_f, new_g
        step[idx] = trial_step
    gnorm = np.sqrt(np.einsum("rkc,rkc->r", g, g))
    return free, f, gnorm


def violation_check(kappa: RadialProfile, config: PointConfig, delta: float,
                    chung_m: int = 1) -> bool:
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    rhs = config_rhs(len(config), delta, chung_m)
    return ie_objective(kappa, config) < rhs - VIOLATION_MARGIN


def minimize_config(kappa: RadialProfile, N: int = 6, restarts: int = 200, seed: int = 1,
                    delta: float | None = None, chung_m: int = 1,
                    max_iter: int = MAX_ITER) -> SearchResult:
    """Best local minimum of the set objective over random restarts.

    The origin is pinned; the other ``N - 1`` points start uniformly in the
    disk of radius 2. ``violated`` is judged at ``delta`` (False without one).
    Ties go to the lowest restart index.
    """
    if N < 2:
        raise DomainError("N must be at least 2")
    if restarts < 1:
        raise DomainError("need at least one restart")
    rng = np.random.default_rng(seed)
    r = INIT_RADIUS * np.sqrt(rng.random((restarts, N - 1)))
    a = 2.0 * math.pi * rng.random((restarts, N - 1))
    free = np.stack([r * np.cos(a), r * np.sin(a)], axis=-1)
    free, f, gnorm = _descend(kappa, free, max_iter=max_iter)
    best = int(np.argmin(f))  # argmin returns the first index on ties
    pts = np.vstack([np.zeros((1, 2)), free[best]])
    config = PointConfig(pts, f"cut(N={N}, seed={seed})")
    objective = ie_objective(kappa, config)
    violated = False if delta is None else violation_check(kappa, config, delta, chung_m)
    log.info("best of %d restarts: objective %.10f, |grad| %.2e", restarts, objective,
             gnorm[best])
    return SearchResult(config, objective, violated, restarts, float(gnorm[best]))


def distance_signature(config: PointConfig) -> np.ndarray:
    return np.sort(pair_distance_array(config))


def is_duplicate(config: PointConfig, existing, tol: float = DUPLICATE_TOL) -> bool:
    """True when the sorted pair distances match an existing set within ``tol``."""
    sig = distance_signature(config)
    for other in existing:
        osig = distance_signature(other)
        if osig.shape == sig.shape and np.max(np.abs(osig - sig), initial=0.0) <= tol:
            return True
    return False
