"""Point configurations, unit-distance graphs and their independence numbers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from .errors import CapacityError, CertificateFormatError, DomainError

DEFAULT_TOLERANCE = 1e-9
MAX_EXHAUSTIVE_VERTICES = 30

# Angle between the long diagonals of the two rhombi of the spindle: the tips
# sit at distance sqrt(3) from the hinge and must be 1 apart.
SPINDLE_HINGE_ANGLE = 2.0 * math.asin(1.0 / (2.0 * math.sqrt(3.0)))


@dataclass
class PointConfig:
    points: np.ndarray
    label: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.size == 0:
            pts = pts.reshape(0, 2)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise DomainError(f"points must have shape (k, 2), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise DomainError("point coordinates must be finite")
        self.points = pts

    def __len__(self):
        return len(self.points)

    def contains_origin(self, tol: float = 0.0) -> bool:
        return bool(np.any(np.all(np.abs(self.points) <= tol, axis=1)))

    def with_origin(self) -> "PointConfig":
        """Same configuration with the origin prepended when it is missing."""
        if self.contains_origin():
            return self
        pts = np.vstack([np.zeros((1, 2)), self.points])
        return PointConfig(pts, self.label)

    def norms(self) -> np.ndarray:
        return np.hypot(self.points[:, 0], self.points[:, 1])


@dataclass
class UnitDistanceGraph:
    vertices: PointConfig
    edges: frozenset = field(default_factory=frozenset)
    tolerance: float = DEFAULT_TOLERANCE
    spindle: tuple | None = None  # (t, theta) for a spindle copy

    @property
    def order(self) -> int:
        return len(self.vertices)

    def adjacency_masks(self) -> list:
        masks = [0] * self.order
        for i, j in self.edges:
            masks[i] |= 1 << j
            masks[j] |= 1 << i
        return masks


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def canonical_spindle() -> np.ndarray:
    """Moser spindle with its hinge vertex at the origin.

    The first rhombus (two unit equilateral triangles) has its bottom edge on
    the positive x-axis; the second is the first rotated counter-clockwise
    about the hinge by :data:`SPINDLE_HINGE_ANGLE`. The hinge is therefore
    the lower-left vertex. Order: hinge, then (edge, edge, tip) of each rhombus.
    """
    s3 = math.sqrt(3.0)
    rhombus = np.array([[1.0, 0.0], [0.5, 0.5 * s3], [1.5, 0.5 * s3]])
    second = rhombus @ rotation(SPINDLE_HINGE_ANGLE).T
    return np.vstack([np.zeros((1, 2)), rhombus, second])


def moser_spindle(t: float, theta: float) -> PointConfig:
    """The congruent copy ``(t, 0) + R(theta) G`` of the canonical spindle."""
    pts = canonical_spindle() @ rotation(theta).T + np.array([t, 0.0])
    return PointConfig(pts, f"spindle(t={t!r}, theta={theta!r})")


def spindle_graph(t: float, theta: float,
                  tolerance: float = DEFAULT_TOLERANCE) -> "UnitDistanceGraph":
    graph = unit_distance_graph(moser_spindle(t, theta), tolerance)
    graph.spindle = (float(t), float(theta))
    return graph


def equilateral_triangle(side: float = 1.0) -> PointConfig:
    pts = side * np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.5 * math.sqrt(3.0)]])
    return PointConfig(pts, "triangle")


def pair_distances(config: PointConfig) -> list:
    """All unordered pairs ``((i, j), distance)`` with ``i < j``."""
    pts = config.points
    return [
        ((i, j), float(math.hypot(*(pts[i] - pts[j]))))
        for i, j in combinations(range(len(pts)), 2)
    ]


def pair_distance_array(config: PointConfig) -> np.ndarray:
    pts = config.points
    i, j = np.triu_indices(len(pts), k=1)
    diff = pts[i] - pts[j]
    return np.hypot(diff[:, 0], diff[:, 1])


def unit_distance_graph(config: PointConfig,
                        tolerance: float = DEFAULT_TOLERANCE) -> UnitDistanceGraph:
    if not 0.0 <= tolerance <= 0.01:
        raise DomainError("tolerance must lie in [0, 0.01]")
    edges = frozenset(
        pair for pair, d in pair_distances(config) if abs(d - 1.0) <= tolerance
    )
    return UnitDistanceGraph(config, edges, tolerance)


def independence_number(graph: UnitDistanceGraph) -> int:
    """Exact independence number by branch and bound over vertex bitmasks."""
    n = graph.order
    if n > MAX_EXHAUSTIVE_VERTICES:
        raise CapacityError(
            f"{n} vertices exceeds the exhaustive budget of {MAX_EXHAUSTIVE_VERTICES}"
        )
    if n == 0:
        return 0
    adj = graph.adjacency_masks()
    best = 0

    def search(candidates: int, size: int):
        nonlocal best
        if candidates == 0:
            best = max(best, size)
            return
        if size + bin(candidates).count("1") <= best:
            return
        # branch on the candidate of highest remaining degree
        v, v_deg = -1, -1
        rest = candidates
        while rest:
            low = rest & -rest
            u = low.bit_length() - 1
            deg = bin(adj[u] & candidates).count("1")
            if deg > v_deg:
                v, v_deg = u, deg
            rest ^= low
        bit = 1 << v
        if v_deg == 0:
            # every remaining candidate is isolated
            best = max(best, size + bin(candidates).count("1"))
            return
        search(candidates & ~bit & ~adj[v], size + 1)
        search(candidates & ~bit, size)

    search((1 << n) - 1, 0)
    return best


def independence_ratio(graph: UnitDistanceGraph) -> float:
    """The averaging bound ``alpha(G) / |V|``."""
    return independence_number(graph) / graph.order


# ---------------------------------------------------------------------------
# Text format: one "x y" per line, '#' comments, blank lines separate sets
# ---------------------------------------------------------------------------

def parse_point_blocks(text: str, label: str = "") -> list:
    blocks, current = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            if current:
                blocks.append(current)
                current = []
            continue
        fields = line.split()
        if len(fields) != 2:
            raise CertificateFormatError(f"line {lineno}: expected 'x y', got {raw!r}")
        try:
            current.append((float(fields[0]), float(fields[1])))
        except ValueError as exc:
            raise CertificateFormatError(f"line {lineno}: {exc}") from None
    if current:
        blocks.append(current)
    configs = []
    for k, pts in enumerate(blocks):
        name = label if len(blocks) == 1 else f"{label}[{k}]"
        try:
            configs.append(PointConfig(np.array(pts), name))
        except DomainError as exc:
            raise CertificateFormatError(str(exc)) from None
    return configs


def read_point_configs(path) -> list:
    path = Path(path)
    return parse_point_blocks(path.read_text(encoding="utf-8"), label=path.stem)


def read_point_config(path) -> PointConfig:
    configs = read_point_configs(path)
    if len(configs) != 1:
        raise CertificateFormatError(f"{path}: expected one point set, found {len(configs)}")
    return configs[0]


def format_point_config(config: PointConfig) -> str:
    lines = [f"# {config.label}"] if config.label else []
    lines += [f"{float(x)!r} {float(y)!r}" for x, y in config.points]
    return "\n".join(lines) + "\n"
