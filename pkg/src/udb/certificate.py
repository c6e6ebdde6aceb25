"""Witness-function certificates and their verification.

A certificate fixes the coefficients of

    W(t) = v0 + v1 Om(t) + sum_G w_G sum_{x in V(G)} Om(t|x|)
              - sum_C z_C sum_{x,y in C} Om(t|x-y|)

where ``Om`` is the radial kernel of the dimension (``J0`` in the plane). If
``W(0) >= 1`` and ``W(t) >= 0`` for all ``t > 0``, every measurable planar set
avoiding distance 1 has density at most the positive root of

    delta^2 = delta * (v0 + sum_G w_G alpha(G) - sum_C z_C m|C|) + sum_C z_C binom(m+1, 2)

with ``m = 1`` giving the plain inclusion-exclusion form. :func:`verify` runs
the full check: value at zero, tail bound beyond ``L``, Lipschitz grid
minimum on ``[0, L]``, slack added to ``v0``, and the quadratic root.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import special_functions as sf
from .errors import DomainError, InfeasibleError, VerificationError
from .geometry import (
    PointConfig,
    UnitDistanceGraph,
    independence_number,
    pair_distance_array,
)
from .workers import map_ordered

MAX_SLACK = 0.01
_EPS = np.finfo(float).eps
_CHUNK = 1 << 16


@dataclass
class WeightedGraph:
    graph: UnitDistanceGraph
    weight: float


@dataclass
class WeightedConfig:
    config: PointConfig
    weight: float


@dataclass
class Certificate:
    v0: float
    v1: float
    graphs: list = field(default_factory=list)
    configs: list = field(default_factory=list)
    dimension: int = 2
    chung_m: int = 1

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 2:
            raise DomainError("dimension must be an integer >= 2")
        if int(self.chung_m) != self.chung_m or self.chung_m < 1:
            raise DomainError("chung_m must be a positive integer")
        for k, g in enumerate(self.graphs):
            if not g.weight >= 0:
                raise DomainError(f"graph weight #{k} is negative: {g.weight}")
        for k, c in enumerate(self.configs):
            if not c.weight >= 0:
                raise DomainError(f"config weight #{k} is negative: {c.weight}")
            if not c.config.contains_origin():
                raise DomainError(f"config #{k} does not contain the origin")


@dataclass(frozen=True)
class WitnessTerms:
    """W flattened to ``constant + sum coef[i] * Om(t * scale[i])``.

    Terms whose scale is zero (a graph vertex at the origin) are folded into
    ``constant``. The order of ``coef`` is the summation order.
    """
    constant: float
    coef: np.ndarray
    scale: np.ndarray
    dimension: int


def witness_terms(cert: Certificate) -> WitnessTerms:
    coefs, scales = [cert.v1], [1.0]
    for g in cert.graphs:
        for r in g.graph.vertices.norms():
            coefs.append(g.weight)
            scales.append(float(r))
    for c in cert.configs:
        for d in pair_distance_array(c.config):
            coefs.append(-c.weight)
            scales.append(float(d))
    coef = np.array(coefs)
    scale = np.array(scales)
    zero = scale == 0.0
    constant = cert.v0 + float(coef[zero].sum())
    keep = ~zero & (coef != 0.0)
    return WitnessTerms(constant, coef[keep], scale[keep], cert.dimension)


def _evaluate_terms(terms: WitnessTerms, t: np.ndarray) -> np.ndarray:
    out = np.full(t.shape, terms.constant)
    for c, d in zip(terms.coef, terms.scale):
        out += c * sf.omega(terms.dimension, t * d)
    return out


def _evaluate_chunked(terms: WitnessTerms, t: np.ndarray) -> np.ndarray:
    if t.size <= _CHUNK:
        return _evaluate_terms(terms, t)
    pieces = [t[i:i + _CHUNK] for i in range(0, t.size, _CHUNK)]
    return np.concatenate(map_ordered(lambda p: _evaluate_terms(terms, p), pieces))


def witness_value(cert: Certificate, t):
    """W(t); vectorised over ``t``."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise DomainError("witness is evaluated at t >= 0 only")
    out = _evaluate_chunked(witness_terms(cert), np.atleast_1d(arr))
    return float(out[0]) if arr.ndim == 0 else out


def _kernel_slope_bound(n: int) -> float:
    # |J0'| = |J1| <= 1/sqrt(2); in general |Om_n'| <= E|xi_1| <= 1.
    return sf.WATSON_J1_BOUND if n == 2 else 1.0


def derivative_bound(cert: Certificate) -> float:
    """Global bound on ``|W'(t)|``."""
    terms = witness_terms(cert)
    return _kernel_slope_bound(cert.dimension) * float(np.sum(np.abs(terms.coef) * terms.scale))


def curvature_bound(cert: Certificate) -> float:
    """Global bound on ``|W''(t)|`` from ``|Om_n''| <= E[xi_1^2] = 1/n``."""
    terms = witness_terms(cert)
    return float(np.sum(np.abs(terms.coef) * terms.scale ** 2)) / cert.dimension


def evaluation_error(cert: Certificate, t_max: float) -> float:
    """Bound on the floating-point error of one computed value of W on [0, t_max]."""
    terms = witness_terms(cert)
    kernel = sf.MAX_ABS_ERROR if cert.dimension == 2 else 1e-10
    mag = np.abs(terms.coef)
    # kernel error, rounding of the argument t*d, and the running sum
    per_term = mag * (kernel + 2.0 * _EPS * t_max * terms.scale)
    summation = 2.0 * (len(mag) + 1) * _EPS * (abs(terms.constant) + mag.sum())
    return float(per_term.sum() + summation)


def tail_bound(cert: Certificate, L: float) -> float:
    """Bound M with ``|W(t) - constant| <= M`` for all ``t >= L``.

    Each term ``c Om(t d)`` is bounded by ``|c| * env(L d)``, where ``env`` is
    the J0 extremum envelope, or 1 when ``L d`` lies below the first zero of
    J1 (or the dimension is not 2).
    """
    if not L > 0:
        raise DomainError("tail start L must be positive")
    terms = witness_terms(cert)
    if terms.coef.size == 0:
        return 0.0
    arg = L * terms.scale
    env = np.ones_like(arg)
    if cert.dimension == 2:
        usable = arg >= sf.first_j1_zero()
        if usable.any():
            env[usable] = np.minimum(1.0, sf.j0_envelope(arg[usable]))
    return float(np.sum(np.abs(terms.coef) * env))


@dataclass(frozen=True)
class GridScan:
    min_value: float
    argmin: float
    step: float
    fine_points: int
    evaluations: int
    refined_intervals: int


def scan_grid(cert: Certificate, L: float, epsilon: float) -> GridScan:
    """Minimum of W over the grid ``{k * step : k * step <= L}``.

    ``step = epsilon / derivative_bound(cert)``. The result is exactly the
    minimum of the computed values on that grid, but most grid points are
    never evaluated: W is sampled on a coarse sub-grid first, and a coarse
    interval is refined only if the curvature bound leaves room for a fine
    point below the running minimum.
    """
    if not epsilon > 0 or not L > 0:
        raise DomainError("epsilon and L must be positive")
    terms = witness_terms(cert)
    lip = derivative_bound(cert)
    if lip == 0.0:
        return GridScan(terms.constant, 0.0, math.inf, 1, 1, 0)
    step = epsilon / lip
    last = int(math.floor(L / step))
    while last * step > L:
        last -= 1
    curv = curvature_bound(cert)
    err = evaluation_error(cert, L)

    coarse_width = math.sqrt(0.8 * epsilon / curv) if curv > 0 else L
    stride = max(1, int(coarse_width / step))
    idx = np.arange(0, last + 1, stride, dtype=np.int64)
    if idx[-1] != last:
        idx = np.append(idx, last)
    values = _evaluate_chunked(terms, idx * step)
    evaluations = idx.size

    pos = int(np.argmin(values))
    best, best_k = float(values[pos]), int(idx[pos])
    lo_end = np.minimum(values[:-1], values[1:])
    width = (idx[1:] - idx[:-1]) * step
    lower = lo_end - curv * width * width / 8.0 - 2.0 * err
    has_interior = (idx[1:] - idx[:-1]) > 1
    refined = 0
    for i in np.argsort(lower, kind="stable"):
        if lower[i] >= best:
            break
        if not has_interior[i]:
            continue
        ks = np.arange(idx[i] + 1, idx[i + 1], dtype=np.int64)
        vals = _evaluate_terms(terms, ks * step)
        evaluations += ks.size
        refined += 1
        j = int(np.argmin(vals))
        if vals[j] < best:
            best, best_k = float(vals[j]), int(ks[j])
    return GridScan(best, best_k * step, step, last + 1, evaluations, refined)


def grid_minimum(cert: Certificate, L: float, epsilon: float):
    """``(min_value, argmin)`` of W on the Lipschitz grid over ``[0, L]``.

    The true minimum over ``[0, L]`` is at least ``min_value - epsilon``.
    """
    scan = scan_grid(cert, L, epsilon)
    return scan.min_value, scan.argmin


def adjust_slack(cert: Certificate, slack: float) -> Certificate:
    if not slack >= 0:
        raise DomainError("slack must be nonnegative")
    return replace(cert, v0=cert.v0 + slack)


def bound_coefficients(cert: Certificate):
    """``(A, B)`` of the bound equation ``delta^2 = A delta + B``."""
    m = cert.chung_m
    pair_weight = m * (m + 1) // 2
    A = cert.v0
    for g in cert.graphs:
        A += g.weight * independence_number(g.graph)
    B = 0.0
    for c in cert.configs:
        A -= c.weight * m * len(c.config)
        B += c.weight * pair_weight
    return A, B


def solve_delta(cert: Certificate) -> float:
    """Positive root of ``delta^2 = A delta + B``."""
    A, B = bound_coefficients(cert)
    if B <= 0 and A <= 0:
        raise InfeasibleError(f"no positive root: A={A!r}, B={B!r}")
    disc = math.sqrt(A * A + 4.0 * B)
    if A >= 0:
        return 0.5 * (A + disc)
    return 2.0 * B / (disc - A)


@dataclass(frozen=True)
class CheckRecord:
    stage: str
    passed: bool
    detail: dict


@dataclass
class VerifiedBound:
    delta: float
    tail_start: float
    tail_margin: float
    grid_step: float
    grid_min: float
    v0_slack: float
    certificate: Certificate
    transcript: list

    def summary(self) -> dict:
        return {
            "delta": self.delta,
            "tail_start": self.tail_start,
            "tail_margin": self.tail_margin,
            "grid_step": self.grid_step,
            "grid_min": self.grid_min,
            "v0_slack": self.v0_slack,
            "transcript": [
                {"stage": r.stage, "passed": bool(r.passed), **r.detail}
                for r in self.transcript
            ],
        }


def verify(cert: Certificate, L: float = 780.0, epsilon: float = 1e-4) -> VerifiedBound:
    """Check that ``cert`` (plus the smallest needed ``v0`` slack) is a witness.

    Raises :class:`VerificationError` naming the failing stage.
    """
    if not L > 0 or not epsilon > 0:
        raise DomainError("L and epsilon must be positive")
    transcript = []
    terms = witness_terms(cert)
    # summing k + 1 exact numbers rounds at most k times
    zero_err = len(terms.coef) * _EPS * (abs(terms.constant) + np.abs(terms.coef).sum())
    phi0 = terms.constant + float(np.sum(terms.coef))
    # the rounding-aware comparison is repeated after the slack stage
    transcript.append(CheckRecord("value_at_zero", phi0 >= 1.0,
                                  {"phi0": phi0, "rounding": zero_err}))

    tail = tail_bound(cert, L)
    margin = terms.constant - tail
    transcript.append(CheckRecord("tail", margin >= 0.0,
                                  {"L": L, "tail_bound": tail, "constant": terms.constant,
                                   "margin": margin}))
    if margin < 0:
        raise VerificationError("tail", f"tail bound {tail:.9g} exceeds constant "
                                f"{terms.constant:.9g}", t=L)

    scan = scan_grid(cert, L, epsilon)
    err = evaluation_error(cert, L)
    certified_min = scan.min_value - epsilon - err
    transcript.append(CheckRecord("grid_minimum", True, {
        "epsilon": epsilon, "step": scan.step, "lipschitz": derivative_bound(cert),
        "min_value": scan.min_value, "argmin": scan.argmin,
        "evaluation_error": err, "certified_min": certified_min,
        "fine_points": scan.fine_points, "evaluations": scan.evaluations,
    }))

    slack = max(0.0, -certified_min, 1.0 - (phi0 - zero_err))
    if slack > MAX_SLACK:
        where = scan.argmin if -certified_min >= 1.0 - (phi0 - zero_err) else 0.0
        raise VerificationError("slack", f"required v0 slack {slack:.6g} exceeds cap "
                                f"{MAX_SLACK}", t=where)
    adjusted = adjust_slack(cert, slack)
    phi0_adj = phi0 + slack
    ok0 = phi0_adj - zero_err >= 1.0
    transcript.append(CheckRecord("slack", ok0, {"v0_slack": slack, "phi0": phi0_adj}))
    if not ok0:
        raise VerificationError("value_at_zero", f"W(0) = {phi0_adj!r} < 1 after slack", t=0.0)

    delta = solve_delta(adjusted)
    A, B = bound_coefficients(adjusted)
    transcript.append(CheckRecord("bound", 0.0 < delta <= 1.0, {"A": A, "B": B, "delta": delta}))
    return VerifiedBound(delta, L, margin + slack, scan.step, scan.min_value, slack,
                         adjusted, transcript)
