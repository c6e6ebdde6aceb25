"""Lower-bound constructions for 1-avoiding planar sets.

* ``hex``: open disks of radius 1/2 centred on a hexagonal lattice with
  minimal vectors of length 2.
* ``tortoise``: disk of radius 1/2 intersected with a regular hexagon of
  height ``x`` (inradius ``x/2``), repeated on a hexagonal lattice with
  minimal vectors of length ``1 + x``. Hexagon sides face the minimal vectors.
* ``nonblock``: open disks of radius ``r = (3 - 2 sqrt 2)/2`` on the square
  lattice ``c Z^2`` with ``c = 2 sqrt 2 - 2``. Adjacent disks come closer
  than 1 to each other, so there is no block decomposition, yet no two points
  are exactly 1 apart.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AuditError, DomainError
from .workers import map_ordered

SQRT3 = math.sqrt(3.0)
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
OPEN_SLACK = 1e-9
MC_CHUNKS = 16


@dataclass(frozen=True)
class TortoiseParams:
    x: float

    def __post_init__(self):
        if not 0.0 < self.x < 1.0:
            raise DomainError(f"hexagon height must lie in (0, 1), got {self.x}")

    @property
    def lattice_scale(self) -> float:
        return 1.0 + self.x


def hex_disk_density() -> float:
    return math.pi / (8.0 * SQRT3)


def hex_cell_area(scale: float) -> float:
    """Area of a fundamental cell of the hexagonal lattice with minimal vector ``scale``."""
    return 0.5 * SQRT3 * scale * scale


def _segment_area(R: float, h: float) -> float:
    """Area of the part of a radius-R disk beyond a chord at distance h from the centre."""
    if h >= R:
        return 0.0
    return R * R * math.acos(h / R) - h * math.sqrt(R * R - h * h)


def tortoise_area(x: float) -> float:
    """Area of (disk of radius 1/2) ∩ (regular hexagon of height x)."""
    if not 0.0 < x < 1.0:
        raise DomainError(f"hexagon height must lie in (0, 1), got {x}")
    R = 0.5
    # hexagon fits inside the disk while its circumradius x/sqrt(3) <= 1/2
    if x <= SQRT3 / 2.0:
        return 0.5 * SQRT3 * x * x
    # otherwise the six caps cut off by the sides are disjoint
    return math.pi * R * R - 6.0 * _segment_area(R, 0.5 * x)


def tortoise_density(x: float) -> float:
    return tortoise_area(x) / hex_cell_area(1.0 + x)


def golden_section_max(f, lo: float, hi: float, tolerance: float = 1e-10):
    """Maximiser of a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tolerance:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def optimize_tortoise(tolerance: float = 1e-10, scan_points: int = 1000):
    """``(x, density)`` maximising the tortoise density over ``x in (0, 1)``.

    A coarse scan of ``(0.5, 1)`` brackets the maximum, then golden-section
    search refines it.
    """
    if tolerance < 1e-12:
        raise DomainError("tolerance must be at least 1e-12")
    xs = np.linspace(0.5, 1.0, scan_points + 1, endpoint=False)[1:]
    ds = np.array([tortoise_density(v) for v in xs])
    k = int(np.argmax(ds))
    lo = xs[max(k - 1, 0)]
    hi = xs[min(k + 1, len(xs) - 1)]
    return golden_section_max(tortoise_density, lo, hi, tolerance)


def nonblock_constants():
    c = 2.0 * math.sqrt(2.0) - 2.0
    r = (3.0 - 2.0 * math.sqrt(2.0)) / 2.0
    return c, r


def nonblock_lattice_density() -> float:
    c, r = nonblock_constants()
    return r * r * math.pi / (c * c)


# ---------------------------------------------------------------------------
# Monte Carlo area check
# ---------------------------------------------------------------------------

HEX_NORMALS = np.array([[math.cos(a), math.sin(a)] for a in (0.0, math.pi / 3, 2 * math.pi / 3)])


def in_tortoise(points: np.ndarray, x: float) -> np.ndarray:
    """Membership in the open tortoise centred at the origin."""
    inside_disk = np.einsum("ij,ij->i", points, points) < 0.25
    inside_hex = np.all(np.abs(points @ HEX_NORMALS.T) < 0.5 * x, axis=1)
    return inside_disk & inside_hex


def _mc_chunk(args):
    x, n, seed_seq = args
    rng = np.random.default_rng(seed_seq)
    pts = rng.random((n, 2)) - 0.5
    return int(np.count_nonzero(in_tortoise(pts, x)))


def monte_carlo_tortoise_area(x: float, samples: int = 10_000_000, seed: int = 7):
    """``(estimate, standard_error)`` of the tortoise area by uniform sampling.

    Samples are split into a fixed number of chunks with their own spawned
    seeds, so the estimate does not depend on the worker count.
    """
    TortoiseParams(x)
    if samples < MC_CHUNKS:
        raise DomainError(f"need at least {MC_CHUNKS} samples")
    sizes = [samples // MC_CHUNKS + (1 if k < samples % MC_CHUNKS else 0)
             for k in range(MC_CHUNKS)]
    seeds = np.random.SeedSequence(seed).spawn(MC_CHUNKS)
    hits = sum(map_ordered(_mc_chunk, [(x, n, s) for n, s in zip(sizes, seeds)]))
    p = hits / samples
    return p, math.sqrt(p * (1.0 - p) / samples)


# ---------------------------------------------------------------------------
# Avoidance audit
# ---------------------------------------------------------------------------

@dataclass
class AuditReport:
    construction: str
    pairs: int
    within_max: float
    cross_min: float
    adjacent_max: float = math.nan
    passed: bool = True
    notes: list = field(default_factory=list)


def _lattice(kind: str, x: float | None):
    if kind == "hex":
        a = 2.0
    elif kind == "tortoise":
        a = 1.0 + x
    else:
        a = nonblock_constants()[0]
        return np.array([a, 0.0]), np.array([0.0, a])
    return np.array([a, 0.0]), np.array([0.5 * a, 0.5 * SQRT3 * a])


def _sample_block(kind, x, n, rng):
    """``n`` uniform points of the open block centred at the origin."""
    radius = nonblock_constants()[1] if kind == "nonblock" else 0.5
    out = np.empty((0, 2))
    while len(out) < n:
        cand = (rng.random((2 * n, 2)) * 2.0 - 1.0) * radius
        keep = np.einsum("ij,ij->i", cand, cand) < radius * radius
        if kind == "tortoise":
            keep &= in_tortoise(cand, x)
        out = np.vstack([out, cand[keep]])
    return out[:n]


def avoidance_audit(construction: str, x: float | None = None, pairs: int = 100_000,
                    seed: int = 7, patch: int = 5) -> AuditReport:
    """Sample point pairs over a ``patch x patch`` piece of the lattice.

    ``construction`` is ``"hex"``, ``"tortoise"`` (height ``x``) or
    ``"nonblock"``. For the first two, distances inside one block must be
    below 1 and distances between different blocks above 1. For ``nonblock``
    pairs in adjacent disks must be below 1 and all other cross pairs above 1.
    Raises :class:`AuditError` naming the first offending pair.
    """
    if construction not in ("hex", "tortoise", "nonblock"):
        raise DomainError(f"unknown construction {construction!r}")
    if construction == "tortoise":
        if x is None:
            raise DomainError("tortoise audit needs x")
        TortoiseParams(x)
    rng = np.random.default_rng(seed)
    e1, e2 = _lattice(construction, x)
    half = patch // 2
    ij = np.array([(i, j) for i in range(-half, patch - half) for j in range(-half, patch - half)])
    centres = ij[:, 0, None] * e1 + ij[:, 1, None] * e2

    n_within = pairs // 2
    n_cross = pairs - n_within
    # within-block pairs
    pa = _sample_block(construction, x, n_within, rng)
    pb = _sample_block(construction, x, n_within, rng)
    within = np.hypot(*(pa - pb).T)
    # cross-block pairs; half of them forced onto lattice neighbours so the
    # closest approaches are well sampled
    ka = rng.integers(len(centres), size=n_cross)
    kb = rng.integers(len(centres), size=n_cross)
    near = np.arange(n_cross) < n_cross // 2
    neigh = np.array([(1, 0), (0, 1), (-1, 0), (0, -1), (1, -1), (-1, 1), (1, 1), (-1, -1)])
    pick = neigh[rng.integers(len(neigh), size=n_cross)]
    target = ij[ka] + pick
    in_patch = np.all((target >= -half) & (target < patch - half), axis=1)
    use = near & in_patch
    kb[use] = (target[use, 0] + half) * patch + (target[use, 1] + half)
    same = ka == kb
    kb[same] = (kb[same] + 1) % len(centres)
    qa = _sample_block(construction, x, n_cross, rng) + centres[ka]
    qb = _sample_block(construction, x, n_cross, rng) + centres[kb]
    cross = np.hypot(*(qa - qb).T)

    report = AuditReport(construction, pairs, float(within.max()), math.inf)
    if construction == "nonblock":
        gap = np.abs(ij[ka] - ij[kb]).sum(axis=1)
        adjacent = gap == 1
        others = ~adjacent
        report.adjacent_max = float(cross[adjacent].max()) if adjacent.any() else math.nan
        report.cross_min = float(cross[others].min())
        report.notes.append(f"{int(np.count_nonzero(adjacent & (cross < 1.0)))} adjacent-disk "
                            "pairs closer than 1")
        bad = np.flatnonzero(adjacent & (cross >= 1.0 + OPEN_SLACK))
        if bad.size:
            k = int(bad[0])
            raise AuditError(f"adjacent disks at distance {cross[k]!r} >= 1",
                             pair=(tuple(qa[k]), tuple(qb[k])))
        cross_check = np.where(others, cross, math.inf)
    else:
        report.cross_min = float(cross.min())
        cross_check = cross
    bad = np.flatnonzero(within >= 1.0 + OPEN_SLACK)
    if bad.size:
        k = int(bad[0])
        raise AuditError(f"points of one block at distance {within[k]!r} >= 1",
                         pair=(tuple(pa[k]), tuple(pb[k])))
    bad = np.flatnonzero(cross_check <= 1.0 - OPEN_SLACK)
    if bad.size:
        k = int(bad[0])
        raise AuditError(f"points of different blocks at distance {cross[k]!r} <= 1",
                         pair=(tuple(qa[k]), tuple(qb[k])))
    return report
