"""Episode scoring on the grid graph: SR, OSR, SPD and CLS.

All distances are geodesics on the 4-connected grid, so walls count.
CLS follows the coverage-weighted-by-length-score definition:

    PC  = mean over reference nodes r of exp(-d(r, P) / sigma)
    EPL = PC * PL(R)
    LS  = EPL / (EPL + |EPL - PL(P)|)
    CLS = PC * LS
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import Unreachable
from .kinematics import Trajectory
from .navgraph import GridGraph, shortest_path, snap, snap_many
from .world import Point, WorldMap, is_passable

UNREACHABLE = math.inf


@dataclass(frozen=True)
class MetricsConfig:
    success_radius: float = 3.0
    cls_sigma: float = 3.0

    def __post_init__(self):
        if self.success_radius <= 0 or self.cls_sigma <= 0:
            raise ValueError("success_radius and cls_sigma must be positive")


@dataclass(frozen=True)
class MetricsReport:
    sr: float
    osr: float
    spd: float
    cls: float

    def as_dict(self) -> dict:
        return {"sr": self.sr, "osr": self.osr, "spd": None if math.isinf(self.spd) else self.spd, "cls": self.cls}


@dataclass
class Episode:
    trajectory: Trajectory
    reference: list[Point]
    goal: Point
    world: WorldMap | None = None

    def __post_init__(self):
        if len(self.reference) < 2:
            raise ValueError("reference route needs at least two points")
        if self.world is not None:
            for p in self.reference:
                if not is_passable(self.world, p):
                    raise ValueError(f"reference point {p} is not passable")


def grid_bfs(grid: GridGraph, sources: Iterable[int]) -> np.ndarray:
    """Geodesic distance in metres from the nearest source to every node (inf if cut off)."""
    hops = np.full(len(grid), -1, dtype=np.int64)
    queue: deque[int] = deque()
    for s in sources:
        if hops[s] < 0:
            hops[s] = 0
            queue.append(s)
    adj = grid.adjacency
    while queue:
        u = queue.popleft()
        h = hops[u] + 1
        for v, _ in adj[u]:
            if hops[v] < 0:
                hops[v] = h
                queue.append(v)
    out = hops.astype(float) * grid.cell
    out[hops < 0] = math.inf
    return out


def geodesic(grid: GridGraph, a: Point, b: Point) -> float:
    return float(grid_bfs(grid, [snap(grid, a)])[snap(grid, b)])


def success(final: Point, goal: Point, grid: GridGraph, tau: float = 3.0) -> bool:
    return geodesic(grid, final, goal) <= tau + 1e-9


def oracle_success(trajectory: Trajectory | Sequence[Point], goal: Point, grid: GridGraph, tau: float = 3.0) -> bool:
    pts = trajectory.points() if isinstance(trajectory, Trajectory) else list(trajectory)
    if not pts:
        return False
    dist = grid_bfs(grid, [snap(grid, goal)])
    nodes = snap_many(grid, pts)
    return bool((dist[nodes] <= tau + 1e-9).any())


def spd(final: Point, goal: Point, grid: GridGraph) -> float:
    return geodesic(grid, final, goal)


def densify(grid: GridGraph, nodes: Sequence[int]) -> list[int]:
    """Join consecutive nodes with grid shortest paths, dropping repeats."""
    out: list[int] = []
    for n in nodes:
        n = int(n)
        if not out:
            out.append(n)
            continue
        if n == out[-1]:
            continue
        if grid.has_edge(out[-1], n):
            out.append(n)
            continue
        path, _ = shortest_path(grid, out[-1], n)
        out.extend(path[1:])
    return out


def path_length(grid: GridGraph, path: Sequence[int]) -> float:
    total = 0.0
    for a, b in zip(path, path[1:]):
        if a == b:
            continue
        w = next((w for n, w in grid.adjacency[a] if n == b), None)
        if w is None:
            raise ValueError(f"nodes {a} and {b} are not adjacent")
        total += w
    return total


def cls(predicted: Sequence[int], reference: Sequence[int], grid: GridGraph, sigma: float = 3.0) -> float:
    """Coverage weighted by length score of a predicted node path against a reference."""
    if not predicted or not reference:
        raise ValueError("paths must be non-empty")
    d = grid_bfs(grid, predicted)
    pc = float(np.mean(np.exp(-d[list(reference)] / sigma)))
    epl = pc * path_length(grid, reference)
    pl = path_length(grid, predicted)
    denom = epl + abs(epl - pl)
    ls = 1.0 if denom == 0.0 else epl / denom
    return pc * ls


def trajectory_nodes(grid: GridGraph, trajectory: Trajectory | Sequence[Point]) -> list[int]:
    pts = trajectory.points() if isinstance(trajectory, Trajectory) else list(trajectory)
    return densify(grid, snap_many(grid, pts).tolist())


def reference_nodes(grid: GridGraph, reference: Sequence[Point]) -> list[int]:
    return densify(grid, [snap(grid, p) for p in reference])


def evaluate_episode(episode: Episode, grid: GridGraph, cfg: MetricsConfig = MetricsConfig()) -> MetricsReport:
    pts = episode.trajectory.points()
    if not pts:
        raise ValueError("trajectory has no samples")
    goal_dist = grid_bfs(grid, [snap(grid, episode.goal)])
    nodes = snap_many(grid, pts)
    final_d = float(goal_dist[nodes[-1]])
    sr = final_d <= cfg.success_radius + 1e-9
    osr = bool((goal_dist[nodes] <= cfg.success_radius + 1e-9).any())
    assert not sr or osr
    try:
        pred = densify(grid, nodes.tolist())
        ref = reference_nodes(grid, episode.reference)
        score = cls(pred, ref, grid, cfg.cls_sigma)
    except Unreachable:
        score = 0.0
    return MetricsReport(sr=float(sr), osr=float(osr), spd=final_d, cls=score)


@dataclass
class Aggregate:
    n: int
    sr: float
    osr: float
    spd: float | None
    cls: float
    unreachable: int = 0
    extras: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"n": self.n, "sr": self.sr, "osr": self.osr, "spd": self.spd, "cls": self.cls, "spd_unreachable": self.unreachable}


def aggregate(reports: Sequence[MetricsReport]) -> Aggregate:
    """Means over episodes; unreachable SPD values are excluded and counted."""
    if not reports:
        raise ValueError("no reports to aggregate")
    finite = [r.spd for r in reports if not math.isinf(r.spd)]
    return Aggregate(
        n=len(reports),
        sr=sum(r.sr for r in reports) / len(reports),
        osr=sum(r.osr for r in reports) / len(reports),
        spd=(sum(finite) / len(finite)) if finite else None,
        cls=sum(r.cls for r in reports) / len(reports),
        unreachable=len(reports) - len(finite),
    )
