"""The discretised radial linear program and its dual certificates.

Variables are the normalised radial masses ``k(t) >= 0`` on the grid
``t = j * epsilon <= L``. The program maximises ``k(0)`` subject to

* ``sum k(t) = 1``
* ``sum k(t) Om(t) = 0``                                   (no mass at distance 1)
* ``sum k(t) sum_{x in V(G)} Om(t|x|) <= alpha(G)``        per graph G
* ``sum k(t) sum_{x,y in C} Om(t|x-y|) >= m|C| - binom(m+1,2)/delta``   per set C

Only the set rows depend on ``delta``; :func:`fixed_point_delta` bisects on
``delta`` until the optimum equals it. The dual multipliers of the rows are
the coefficients ``v0, v1, w_G, -z_C`` of a witness certificate.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .certificate import Certificate, WeightedConfig, WeightedGraph
from .errors import ConvergenceError, DomainError, ExtractionError
from .geometry import PointConfig, UnitDistanceGraph, independence_number, pair_distance_array
from .simplex import INFEASIBLE, OPTIMAL, simplex_max
from .special_functions import omega

log = logging.getLogger(__name__)

MAX_BISECTION_STEPS = 60


@dataclass
class RadialProfile:
    """Finitely supported nonnegative masses ``t -> k(t)``."""
    t: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.mass = np.asarray(self.mass, dtype=float)
        if self.t.shape != self.mass.shape or self.t.ndim != 1:
            raise DomainError("t and mass must be 1-D arrays of equal length")
        if np.any(self.t < 0) or np.any(self.mass < 0):
            raise DomainError("radial profile needs t >= 0 and mass >= 0")

    @classmethod
    def from_grid(cls, grid: np.ndarray, x: np.ndarray, threshold: float = 0.0):
        keep = x > threshold
        return cls(grid[keep], x[keep])

    def save(self, path) -> None:
        lines = [f"{float(t)!r} {float(m)!r}" for t, m in zip(self.t, self.mass)]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "RadialProfile":
        ts, ms = [], []
        for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DomainError(f"{path}:{lineno}: expected 't value'")
            ts.append(float(parts[0]))
            ms.append(float(parts[1]))
        return cls(np.array(ts), np.array(ms))


@dataclass
class DiscretizedLP:
    grid: np.ndarray
    matrix: np.ndarray
    senses: list
    rhs: np.ndarray
    objective: np.ndarray
    labels: list
    delta: float
    chung_m: int
    graphs: list = field(default_factory=list)
    configs: list = field(default_factory=list)
    dimension: int = 2

    @property
    def shape(self):
        return self.matrix.shape


@dataclass
class LPSolution:
    primal: RadialProfile
    dual: np.ndarray
    status: str
    objective_value: float
    x: np.ndarray = None
    iterations: int = 0
    primal_residual: float = math.nan
    dual_infeasibility: float = math.nan
    duality_gap: float = math.nan


def frequency_grid(L: float, epsilon: float) -> np.ndarray:
    if not 0 < epsilon <= L:
        raise DomainError("need 0 < epsilon <= L")
    count = int(math.floor(L / epsilon + 1e-9)) + 1
    return epsilon * np.arange(count)


def config_rhs(size: int, delta: float, chung_m: int = 1) -> float:
    return chung_m * size - (chung_m * (chung_m + 1) // 2) / delta


def graph_row(graph: UnitDistanceGraph, grid: np.ndarray, dimension: int = 2) -> np.ndarray:
    row = np.zeros_like(grid)
    for r in graph.vertices.norms():
        row += omega(dimension, grid * r)
    return row


def config_row(config: PointConfig, grid: np.ndarray, dimension: int = 2) -> np.ndarray:
    row = np.zeros_like(grid)
    for d in pair_distance_array(config):
        row += omega(dimension, grid * d)
    return row


def build_lp(delta: float, graphs, configs, L: float, epsilon: float,
             chung_m: int = 1, dimension: int = 2) -> DiscretizedLP:
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    grid = frequency_grid(L, epsilon)
    configs = [c.with_origin() for c in configs]
    rows = [np.ones_like(grid), omega(dimension, grid)]
    senses = ["=", "="]
    rhs = [1.0, 0.0]
    labels = ["mass", "omega"]
    for k, g in enumerate(graphs):
        rows.append(graph_row(g, grid, dimension))
        senses.append("<=")
        rhs.append(float(independence_number(g)))
        labels.append(f"graph[{k}]")
    for k, c in enumerate(configs):
        rows.append(config_row(c, grid, dimension))
        senses.append(">=")
        rhs.append(config_rhs(len(c), delta, chung_m))
        labels.append(f"config[{k}]")
    objective = np.zeros_like(grid)
    objective[0] = 1.0
    return DiscretizedLP(grid, np.vstack(rows), senses, np.array(rhs), objective, labels,
                         float(delta), int(chung_m), list(graphs), list(configs), dimension)


def with_delta(lp: DiscretizedLP, delta: float) -> DiscretizedLP:
    """The same program with the set rows' right-hand sides moved to ``delta``."""
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    rhs = lp.rhs.copy()
    first = 2 + len(lp.graphs)
    for k, c in enumerate(lp.configs):
        rhs[first + k] = config_rhs(len(c), delta, lp.chung_m)
    return replace(lp, rhs=rhs, delta=float(delta))


def solve_lp(lp: DiscretizedLP) -> LPSolution:
    res = simplex_max(lp.objective, lp.matrix, lp.senses, lp.rhs)
    if res.status != OPTIMAL:
        empty = RadialProfile(np.array([]), np.array([]))
        return LPSolution(empty, res.duals, res.status, res.objective,
                          iterations=res.iterations)
    x = res.x
    lhs = lp.matrix @ x
    viol = np.zeros_like(lhs)
    for i, s in enumerate(lp.senses):
        if s == "=":
            viol[i] = abs(lhs[i] - lp.rhs[i])
        elif s == "<=":
            viol[i] = max(0.0, lhs[i] - lp.rhs[i])
        else:
            viol[i] = max(0.0, lp.rhs[i] - lhs[i])
    gap = abs(float(lp.rhs @ res.duals) - res.objective)
    return LPSolution(RadialProfile.from_grid(lp.grid, x), res.duals, OPTIMAL, res.objective,
                      x=x, iterations=res.iterations, primal_residual=float(viol.max()),
                      dual_infeasibility=max(0.0, res.reduced_cost_max), duality_gap=gap)


def fixed_point_delta(graphs, configs, L: float = 200.0, epsilon: float = 0.01,
                      chung_m: int = 1, tolerance: float = 1e-7, dimension: int = 2):
    """``(delta, solution)`` with ``|sup k(0) - delta| <= tolerance``.

    The optimum is non-increasing in ``delta``, so the crossing is found by
    bisection; an infeasible program counts as an optimum of minus infinity.
    """
    if tolerance < 1e-7:
        raise DomainError("tolerance must be at least 1e-7")
    lp = build_lp(0.5, graphs, configs, L, epsilon, chung_m, dimension)
    if not configs:
        sol = solve_lp(lp)
        return sol.objective_value, sol

    def gap_at(delta):
        sol = solve_lp(with_delta(lp, delta))
        if sol.status == INFEASIBLE:
            return -math.inf, sol
        return sol.objective_value - delta, sol

    lo, hi = 0.2, 0.3
    if gap_at(lo)[0] <= 0:
        lo = 1e-6
    if gap_at(hi)[0] >= 0:
        hi = 1.0 - 1e-9
    for step in range(MAX_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        g, sol = gap_at(mid)
        log.debug("bisection step %d: delta=%.10f gap=%.3e", step, mid, g)
        if abs(g) <= tolerance:
            return mid, sol
        if g > 0:
            lo = mid
        else:
            hi = mid
    raise ConvergenceError(f"no fixed point within {MAX_BISECTION_STEPS} bisection steps "
                           f"(bracket [{lo}, {hi}])")


def extract_certificate(lp: DiscretizedLP, solution: LPSolution, graphs=None,
                        configs=None, sign_tol: float = 1e-9) -> Certificate:
    """Witness coefficients from the dual multipliers of an optimal solution."""
    if solution.status != OPTIMAL:
        raise ExtractionError(f"solution is {solution.status}, not optimal")
    graphs = lp.graphs if graphs is None else graphs
    configs = lp.configs if configs is None else configs
    y = solution.dual
    w = y[2:2 + len(graphs)]
    z = -y[2 + len(graphs):2 + len(graphs) + len(configs)]
    if np.any(w < -sign_tol) or np.any(z < -sign_tol):
        raise ExtractionError(f"dual signs violated: w={w}, z={z}")
    return Certificate(
        v0=float(y[0]),
        v1=float(y[1]),
        graphs=[WeightedGraph(g, max(0.0, float(wi))) for g, wi in zip(graphs, w)],
        configs=[WeightedConfig(c, max(0.0, float(zi)))
                 for c, zi in zip(configs, z)],
        dimension=lp.dimension,
        chung_m=lp.chung_m,
    )
