"""Sampled navigation graph for the baseline agent and 0.5 m grid graph for metrics."""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMap, Unreachable
from .world import Point, WorldMap, passable_mask, segment_clear, union_corners

DEFAULT_CANDIDATES = 1000
DEFAULT_MIN_DIST = 2.5
NODE_CLEARANCE = 0.5


@dataclass
class Graph:
    """Undirected weighted graph over 2D points; node ids are 0..n-1."""

    points: np.ndarray  # (n, 2)
    edges: list[tuple[int, int, float]]
    adjacency: dict[int, list[tuple[int, float]]] = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if not self.adjacency:
            adj: dict[int, list[tuple[int, float]]] = {i: [] for i in range(len(self.points))}
            for a, b, w in self.edges:
                adj[a].append((b, w))
                adj[b].append((a, w))
            for v in adj.values():
                v.sort()
            self.adjacency = adj

    def __len__(self) -> int:
        return len(self.points)

    @property
    def nodes(self) -> list[tuple[int, Point]]:
        return [(i, (float(x), float(y))) for i, (x, y) in enumerate(self.points)]

    def point(self, node: int) -> Point:
        x, y = self.points[node]
        return (float(x), float(y))

    def neighbors(self, node: int) -> list[tuple[int, float]]:
        return self.adjacency[node]

    def has_edge(self, a: int, b: int) -> bool:
        return any(n == b for n, _ in self.adjacency[a])

    def to_json(self) -> str:
        return json.dumps(
            {
                "nodes": [{"id": i, "x": p[0], "y": p[1]} for i, p in self.nodes],
                "edges": [[a, b, w] for a, b, w in self.edges],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        doc = json.loads(text)
        nodes = sorted(doc["nodes"], key=lambda n: n["id"])
        if [n["id"] for n in nodes] != list(range(len(nodes))):
            raise ValueError("node ids must be 0..n-1")
        return cls(np.array([[n["x"], n["y"]] for n in nodes]), [(int(a), int(b), float(w)) for a, b, w in doc["edges"]])


@dataclass
class NavGraph(Graph):
    corner_ids: frozenset[int] = frozenset()


@dataclass
class GridGraph(Graph):
    cell: float = 0.5
    origin: Point = (0.0, 0.0)
    shape: tuple[int, int] = (0, 0)  # (nx, ny)
    cell_index: dict[tuple[int, int], int] = field(default_factory=dict)

    def cell_of(self, node: int) -> tuple[int, int]:
        x, y = self.points[node]
        return (int(round((x - self.origin[0]) / self.cell - 0.5)), int(round((y - self.origin[1]) / self.cell - 0.5)))


# --- sampling -------------------------------------------------------------


def sample_passable(world: WorldMap, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` points uniformly distributed over the corridor union.

    Draws from rectangles in proportion to area and thins points covered by k
    rectangles with probability 1/k, which is exactly uniform on the union.
    """
    rects = world._rects
    areas = (rects[:, 2] - rects[:, 0]) * (rects[:, 3] - rects[:, 1])
    if areas.sum() <= 0:
        raise DegenerateMap("map has no passable area")
    probs = areas / areas.sum()
    out = []
    have = 0
    while have < n:
        batch = max(64, 2 * (n - have))
        idx = rng.choice(len(rects), size=batch, p=probs)
        u = rng.random((batch, 2))
        r = rects[idx]
        pts = np.column_stack((r[:, 0] + u[:, 0] * (r[:, 2] - r[:, 0]), r[:, 1] + u[:, 1] * (r[:, 3] - r[:, 1])))
        x, y = pts[:, 0:1], pts[:, 1:2]
        cover = ((x >= rects[:, 0]) & (x <= rects[:, 2]) & (y >= rects[:, 1]) & (y <= rects[:, 3])).sum(axis=1)
        keep = rng.random(batch) < 1.0 / cover
        pts = pts[keep]
        out.append(pts)
        have += len(pts)
    return np.concatenate(out)[:n]


def _sector(dx: float, dy: float) -> int:
    """0=E, 1=N, 2=W, 3=S; each sector spans 90 degrees centred on its cardinal."""
    angle = math.atan2(dy, dx)
    return int(math.floor((angle + math.pi / 4) / (math.pi / 2))) % 4


def _point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return np.hypot(p[:, 0] - a[0], p[:, 1] - a[1])
    t = np.clip(((p - a) @ ab) / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    return np.hypot(p[:, 0] - proj[:, 0], p[:, 1] - proj[:, 1])


def build_nav_graph(
    world: WorldMap,
    n_candidates: int = DEFAULT_CANDIDATES,
    min_dist: float = DEFAULT_MIN_DIST,
    seed: int = 0,
    node_clearance: float = NODE_CLEARANCE,
) -> NavGraph:
    """Random waypoint graph over the passable corridors.

    Candidates are thinned greedily in sample order so that no two nodes are
    closer than ``min_dist`` (inner corridor corners take part in the
    rejection test), corner points are added as nodes, and each node links to
    its nearest neighbour in each of the four cardinal sectors unless the
    segment crosses a wall or passes within ``node_clearance`` of another node.
    """
    if n_candidates < 1:
        raise ValueError("n_candidates must be >= 1")
    if min_dist <= 0:
        raise ValueError("min_dist must be positive")
    rng = np.random.default_rng(seed)
    candidates = sample_passable(world, n_candidates, rng)
    corners = np.array(union_corners(world), dtype=float).reshape(-1, 2)

    accepted: list[np.ndarray] = []
    taken = np.empty((0, 2))
    taken = np.vstack([taken, corners])
    for p in candidates:
        if len(taken):
            d2 = ((taken - p) ** 2).sum(axis=1)
            if d2.min() < min_dist * min_dist:
                continue
        accepted.append(p)
        taken = np.vstack([taken, p])
    sampled = np.array(accepted).reshape(-1, 2)
    points = np.vstack([sampled, corners])
    corner_ids = frozenset(range(len(sampled), len(points)))

    proposals: set[tuple[int, int]] = set()
    n = len(points)
    for i in range(n):
        best: dict[int, tuple[float, int]] = {}
        for j in range(n):
            if j == i:
                continue
            dx, dy = points[j] - points[i]
            d = math.hypot(dx, dy)
            s = _sector(dx, dy)
            if s not in best or (d, j) < best[s]:
                best[s] = (d, j)
        for _, j in best.values():
            proposals.add((min(i, j), max(i, j)))

    edges = []
    for a, b in sorted(proposals):
        pa, pb = points[a], points[b]
        if not segment_clear(world, tuple(pa), tuple(pb)):
            continue
        others = np.delete(np.arange(n), [a, b])
        if len(others) and _point_segment_distance(points[others], pa, pb).min() < node_clearance:
            continue
        edges.append((a, b, float(math.hypot(*(pb - pa)))))
    return NavGraph(points, edges, corner_ids=corner_ids)


def graph_stats(g: Graph) -> dict:
    n, m = len(g), len(g.edges)
    return {
        "nodes": n,
        "edges": m,
        "mean_edge_length": (sum(w for _, _, w in g.edges) / m) if m else 0.0,
        "mean_degree": (2.0 * m / n) if n else 0.0,
    }


def build_grid_graph(world: WorldMap, cell: float = 0.5) -> GridGraph:
    """Lattice of ``cell``-sized squares aligned to the map bounding box.

    A node sits at every passable cell centre; orthogonal neighbours are
    joined when the shared cell edge midpoint is passable too.
    """
    if cell <= 0:
        raise ValueError("cell must be positive")
    b = world.bounds
    if b.width <= 0 or b.height <= 0:
        raise DegenerateMap("map has no passable area")
    nx = int(math.ceil(b.width / cell - 1e-9))
    ny = int(math.ceil(b.height / cell - 1e-9))
    xs = b.xmin + (np.arange(nx) + 0.5) * cell
    ys = b.ymin + (np.arange(ny) + 0.5) * cell
    gx, gy = np.meshgrid(xs, ys)  # row-major: y outer, x inner
    centers = np.column_stack((gx.ravel(), gy.ravel()))
    ok = passable_mask(world, centers).reshape(ny, nx)
    if not ok.any():
        raise DegenerateMap("no passable cell centres")
    ids = -np.ones((ny, nx), dtype=int)
    ids[ok] = np.arange(int(ok.sum()))
    points = centers[ok.ravel()]

    # candidate edges: right and up neighbours, filtered on the shared-edge midpoint
    pairs = []
    mids = []
    for dj, di in ((0, 1), (1, 0)):
        both = ok[: ny - dj, : nx - di] & ok[dj:, di:]
        jj, ii = np.nonzero(both)
        a = ids[jj, ii]
        c = ids[jj + dj, ii + di]
        pairs.append(np.column_stack((a, c)))
        mids.append(np.column_stack((xs[ii] + di * cell / 2, ys[jj] + dj * cell / 2)))
    pairs_arr = np.concatenate(pairs)
    mids_arr = np.concatenate(mids)
    keep = passable_mask(world, mids_arr)
    pairs_arr = pairs_arr[keep]
    order = np.lexsort((pairs_arr[:, 1], pairs_arr[:, 0]))
    edges = [(int(a), int(c), float(cell)) for a, c in pairs_arr[order]]
    index = {(int(i), int(j)): int(ids[j, i]) for j, i in zip(*np.nonzero(ok))}
    return GridGraph(points, edges, cell=cell, origin=(b.xmin, b.ymin), shape=(nx, ny), cell_index=index)


# --- queries --------------------------------------------------------------

_TIE_EPS = 1e-9


def dijkstra(g: Graph, source: int) -> tuple[list[float], list[int]]:
    """Distances and predecessors from ``source``; equal-cost ties prefer the smaller predecessor id."""
    n = len(g)
    dist = [math.inf] * n
    pred = [-1] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    done = [False] * n
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in g.adjacency[u]:
            nd = d + w
            if nd < dist[v] - _TIE_EPS:
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
            elif abs(nd - dist[v]) <= _TIE_EPS and u < pred[v]:
                pred[v] = u
    return dist, pred


def shortest_path(g: Graph, a: int, b: int) -> tuple[list[int], float]:
    """Minimum-weight path a->b as (node list, length); raises Unreachable."""
    if a == b:
        return [a], 0.0
    dist, pred = dijkstra(g, a)
    if math.isinf(dist[b]):
        raise Unreachable(f"no path from {a} to {b}")
    path = [b]
    while path[-1] != a:
        path.append(pred[path[-1]])
    path.reverse()
    return path, dist[b]


def snap(g: Graph, p: Point) -> int:
    """Nearest node by Euclidean distance; ties go to the smaller id."""
    if len(g) == 0:
        raise ValueError("graph is empty")
    d2 = (g.points[:, 0] - p[0]) ** 2 + (g.points[:, 1] - p[1]) ** 2
    return int(np.argmin(d2))


def snap_many(g: Graph, pts, chunk: int = 512) -> np.ndarray:
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    out = np.empty(len(pts), dtype=int)
    for s in range(0, len(pts), chunk):
        block = pts[s : s + chunk]
        d2 = (block[:, None, 0] - g.points[None, :, 0]) ** 2 + (block[:, None, 1] - g.points[None, :, 1]) ** 2
        out[s : s + chunk] = np.argmin(d2, axis=1)
    return out


def components(g: Graph) -> list[int]:
    """Component label per node (label = smallest node id in the component)."""
    label = [-1] * len(g)
    for s in range(len(g)):
        if label[s] >= 0:
            continue
        label[s] = s
        stack = [s]
        while stack:
            u = stack.pop()
            for v, _ in g.adjacency[u]:
                if label[v] < 0:
                    label[v] = s
                    stack.append(v)
    return label
