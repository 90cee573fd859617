import itertools
import json
import math
import random
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmh.errors import Unreachable
from mmh.navgraph import (
    Graph,
    build_grid_graph,
    build_nav_graph,
    components,
    graph_stats,
    shortest_path,
    snap,
    snap_many,
)
from mmh.world import is_passable, load_bundled_map, make_map

from conftest import l_map

GOLDEN = Path(__file__).parent / "golden" / "navgraph_seed42.json"


def bellman_ford(n, edges, src):
    dist = [math.inf] * n
    dist[src] = 0.0
    for _ in range(n - 1):
        changed = False
        for a, b, w in edges:
            for u, v in ((a, b), (b, a)):
                if dist[u] + w < dist[v]:
                    dist[v] = dist[u] + w
                    changed = True
        if not changed:
            break
    return dist


def random_graph(rng, n, p):
    pts = [(rng.uniform(0, 100), rng.uniform(0, 100)) for _ in range(n)]
    edges = [(a, b, round(rng.uniform(0.1, 10.0), 3)) for a, b in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph(np.array(pts), edges)


def segment_passable(world, a, b, step=1e-3):
    n = max(1, int(math.hypot(b[0] - a[0], b[1] - a[1]) / step))
    t = np.linspace(0.0, 1.0, n + 1)
    from mmh.world import passable_mask

    pts = np.column_stack((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
    return bool(passable_mask(world, pts).all())


def check_invariants(world, g, min_dist):
    sampled = [i for i in range(len(g)) if i not in g.corner_ids]
    pts = g.points
    for i, j in itertools.combinations(range(len(g)), 2):
        if i in g.corner_ids and j in g.corner_ids:
            continue
        assert math.dist(pts[i], pts[j]) >= min_dist - 1e-9
    for a, b, w in g.edges:
        assert w == pytest.approx(math.dist(pts[a], pts[b]))
        assert segment_passable(world, pts[a], pts[b])
    pairs = {(min(a, b), max(a, b)) for a, b, _ in g.edges}
    assert len(pairs) == len(g.edges)
    assert all(is_passable(world, tuple(p)) for p in pts)
    assert sampled


def test_single_corridor_seed7():
    w = make_map([("c", (0, 0), (10, 2), "x")], (1, 1, 0), (9, 1))
    g = build_nav_graph(w, seed=7)
    check_invariants(w, g, 2.5)
    assert g.corner_ids == frozenset()


def test_l_map_includes_corner():
    w = l_map()
    g = build_nav_graph(w, seed=3)
    check_invariants(w, g, 2.5)
    corners = [tuple(g.points[i]) for i in g.corner_ids]
    assert corners == [(8.75, -1.25)]


def test_disjoint_corridors_stay_apart():
    w = make_map([("a", (0, 0), (10, 2), "x"), ("b", (0, 5), (10, 7), "x")], (1, 1, 0), (9, 6))
    g = build_nav_graph(w, seed=1)
    labels = components(g)
    assert len(set(labels)) >= 2
    for a, b, _ in g.edges:
        assert (g.points[a][1] < 3) == (g.points[b][1] < 3)


def test_degree_at_most_four_per_proposer_and_deterministic():
    w = load_bundled_map("route_1")
    g1 = build_nav_graph(w, seed=5)
    g2 = build_nav_graph(w, seed=5)
    assert np.array_equal(g1.points, g2.points) and g1.edges == g2.edges
    assert graph_stats(g1)["mean_degree"] <= 4.0


def test_bad_parameters():
    w = l_map()
    with pytest.raises(ValueError):
        build_nav_graph(w, n_candidates=0)
    with pytest.raises(ValueError):
        build_nav_graph(w, min_dist=0)


def test_stats_examples():
    tri = Graph(np.array([(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)]), [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
    assert graph_stats(tri) == {"nodes": 3, "edges": 3, "mean_edge_length": 1.0, "mean_degree": 2.0}
    empty = Graph(np.zeros((5, 2)), [])
    assert graph_stats(empty) == {"nodes": 5, "edges": 0, "mean_edge_length": 0.0, "mean_degree": 0.0}


def test_golden_stats_seed42():
    golden = json.loads(GOLDEN.read_text())
    for name, expect in golden.items():
        got = graph_stats(build_nav_graph(load_bundled_map(name), seed=42))
        assert got["nodes"] == expect["nodes"]
        assert got["edges"] == expect["edges"]
        assert got["mean_edge_length"] == pytest.approx(expect["mean_edge_length"], rel=1e-12)


def test_grid_of_10_by_2_corridor():
    w = make_map([("c", (0, 0), (10, 2), "x")], (1, 1, 0), (9, 1))
    g = build_grid_graph(w)
    assert len(g) == 80
    assert g.shape == (20, 4)
    # 4 rows of 19 horizontal links plus 20 columns of 3 vertical links
    assert len(g.edges) == 4 * 19 + 20 * 3
    assert {g.cell_of(i) for i in range(len(g))} == {(i, j) for i in range(20) for j in range(4)}


def test_grid_l_map_count_matches_brute_force():
    w = l_map()
    g = build_grid_graph(w)
    b = w.bounds
    nx, ny = math.ceil(b.width / 0.5), math.ceil(b.height / 0.5)
    brute = sum(
        is_passable(w, (b.xmin + (i + 0.5) * 0.5, b.ymin + (j + 0.5) * 0.5)) for i in range(nx) for j in range(ny)
    )
    assert len(g) == brute


def test_grid_corner_touch_has_no_edge():
    w = make_map([("a", (0, 0), (2, 2), "x"), ("b", (2, 2), (4, 4), "x")], (1, 1, 0), (3, 3))
    g = build_grid_graph(w)
    assert len(set(components(g))) == 2


def test_grid_nodes_passable_and_edges_orthogonal():
    w = load_bundled_map("route_1")
    g = build_grid_graph(w)
    for a, b, wgt in g.edges:
        (ia, ja), (ib, jb) = g.cell_of(a), g.cell_of(b)
        assert abs(ia - ib) + abs(ja - jb) == 1
        assert wgt == 0.5
    assert all(is_passable(w, tuple(p)) for p in g.points)


def test_shortest_path_basics():
    line = Graph(np.array([(0.5 * i, 0) for i in range(5)]), [(i, i + 1, 0.5) for i in range(4)])
    assert shortest_path(line, 2, 2) == ([2], 0.0)
    path, length = shortest_path(line, 0, 4)
    assert path == [0, 1, 2, 3, 4]
    assert length == pytest.approx(2.0)
    split = Graph(np.zeros((4, 2)), [(0, 1, 1.0)])
    with pytest.raises(Unreachable):
        shortest_path(split, 0, 3)


def test_shortest_path_tie_break_smaller_id():
    # diamond 0-1-3 and 0-2-3 of equal length
    g = Graph(np.zeros((4, 2)), [(0, 2, 1.0), (2, 3, 1.0), (0, 1, 1.0), (1, 3, 1.0)])
    assert shortest_path(g, 0, 3)[0] == [0, 1, 3]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_shortest_path_matches_bellman_ford(seed):
    rng = random.Random(seed)
    g = random_graph(rng, 60, 0.06)
    src = rng.randrange(60)
    ref = bellman_ford(60, g.edges, src)
    for dst in range(60):
        if math.isinf(ref[dst]):
            with pytest.raises(Unreachable):
                shortest_path(g, src, dst)
        else:
            path, length = shortest_path(g, src, dst)
            assert length == pytest.approx(ref[dst], abs=1e-9)
            assert path[0] == src and path[-1] == dst


def test_snap_examples():
    g = Graph(np.array([(0, 0), (5, 5), (1, 1), (4, 0), (9, 9), (9, 0), (8, 8), (6, 0)]), [])
    assert snap(g, (5.0, 5.0)) == 1
    # equidistant from nodes 3 (4,0) and 7 (6,0)
    assert snap(g, (5.0, 0.0)) == 3


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_snap_matches_linear_scan(seed):
    rng = random.Random(seed)
    g = random_graph(rng, 40, 0.0)
    pts = [(rng.uniform(-10, 110), rng.uniform(-10, 110)) for _ in range(20)]
    many = snap_many(g, pts)
    for p, m in zip(pts, many):
        best = min(range(len(g)), key=lambda i: ((g.points[i][0] - p[0]) ** 2 + (g.points[i][1] - p[1]) ** 2, i))
        assert snap(g, p) == best == m


def test_grid_geodesic_sanity():
    from mmh.metrics import grid_bfs

    w = load_bundled_map("route_2")
    g = build_grid_graph(w)
    rng = random.Random(0)
    for _ in range(30):
        a, b = rng.randrange(len(g)), rng.randrange(len(g))
        d = grid_bfs(g, [a])[b]
        assert d >= math.dist(g.points[a], g.points[b]) - 0.5 * math.sqrt(2)


def test_graph_json_round_trip():
    g = build_nav_graph(l_map(), seed=2)
    again = Graph.from_json(g.to_json())
    assert np.allclose(again.points, g.points)
    assert again.edges == g.edges
