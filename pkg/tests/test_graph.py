from __future__ import annotations

import itertools
import threading

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onlinesteiner.generators import gen_connected_graph
from onlinesteiner.graph import (
    GraphError,
    MetricView,
    UnreachableError,
    WeightedGraph,
    graph_radius,
    metric_closure,
    mst,
    shortest_path,
    tree_path,
)


def test_graph_merges_parallel_edges_to_cheapest():
    g = WeightedGraph.from_edges(3, [(0, 1, 5), (1, 0, 2), (1, 2, 1)])
    assert g.m == 2
    assert g.edge_cost(0, 1) == 2.0


@pytest.mark.parametrize(
    "edges, msg",
    [([(0, 0, 1)], "self-loop"), ([(0, 1, -1)], "negative"), ([(0, 3, 1)], "range")],
)
def test_graph_rejects_bad_edges(edges, msg):
    with pytest.raises(GraphError):
        WeightedGraph.from_edges(3, edges)


def test_directed_graph_needs_root():
    with pytest.raises(GraphError):
        WeightedGraph.from_edges(2, [(0, 1, 1)], directed=True)


def test_shortest_path_unique_route(path_abc):
    cost, path = shortest_path(path_abc, 0, 2)
    assert cost == 5
    assert path == [(0, 1, 2.0), (1, 2, 3.0)]


def test_shortest_path_identity(path_abc):
    assert shortest_path(path_abc, 1, 1) == (0.0, [])


def test_shortest_path_unreachable_marker():
    g = WeightedGraph.from_edges(3, [(0, 1, 1)])
    cost, path = shortest_path(g, 0, 2)
    assert cost == float("inf") and path == []


def test_shortest_path_invalid_node(path_abc):
    with pytest.raises(GraphError):
        shortest_path(path_abc, 0, 9)


def test_shortest_path_matches_simple_path_enumeration():
    g = gen_connected_graph(8, 8, seed=7)
    h = nx.Graph()
    h.add_weighted_edges_from(g.edges())
    for u, v in itertools.combinations(range(8), 2):
        best = min(
            sum(h[a][b]["weight"] for a, b in zip(p, p[1:])) for p in nx.all_simple_paths(h, u, v)
        )
        cost, path = shortest_path(g, u, v)
        assert cost == best
        assert sum(w for *_, w in path) == cost
    # frozen from the enumeration above
    assert shortest_path(g, 0, 7)[0] == 6.0


def test_shortest_path_directed_follows_arcs():
    g = WeightedGraph.from_edges(3, [(0, 1, 1), (1, 2, 1), (2, 0, 10)], directed=True, root=0)
    assert shortest_path(g, 0, 2)[0] == 2
    assert shortest_path(g, 2, 0)[0] == 10


def test_path_tie_break_prefers_smaller_predecessor():
    # two equal routes 0-1-3 and 0-2-3
    g = WeightedGraph.from_edges(4, [(0, 2, 1), (2, 3, 1), (0, 1, 1), (1, 3, 1)])
    assert MetricView(g).path(0, 3) == [(0, 1, 1.0), (1, 3, 1.0)]


def test_zero_cost_edges_keep_exact_distances():
    g = WeightedGraph.from_edges(3, [(0, 1, 0), (1, 2, 0.25)])
    view = MetricView(g)
    assert view.dist(0, 2) == 0.25
    assert view.path(0, 2) == [(0, 1, 0.0), (1, 2, 0.25)]


def test_metric_closure_shortcut():
    g = WeightedGraph.from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 5)])
    cl = metric_closure(g, [0, 2])
    assert cl.weight(0, 2) == 2
    assert cl.witness(0, 2) == [(0, 1, 1.0), (1, 2, 1.0)]


def test_metric_closure_fixed_point_on_metric_input():
    g = WeightedGraph.from_edges(3, [(0, 1, 2), (1, 2, 3), (0, 2, 4)])
    cl = metric_closure(g, range(3))
    assert cl.weight(0, 1) == 2 and cl.weight(1, 2) == 3 and cl.weight(0, 2) == 4


def test_metric_closure_hard_instance_weight(hard10):
    g, _, _ = hard10
    assert metric_closure(g, [0, 9]).weight(0, 9) == 1.015625


def test_metric_closure_disconnected():
    g = WeightedGraph.from_edges(3, [(0, 1, 1)])
    with pytest.raises(UnreachableError):
        metric_closure(g, [0, 2])


def test_mst_drops_heaviest_cycle_edge():
    g = WeightedGraph.from_edges(4, [(0, 1, 1), (1, 2, 2), (2, 3, 3), (3, 0, 4)])
    t = mst(g)
    assert t.total == 6
    assert sorted(e.cost for e in t.edges) == [1, 2, 3]


def test_mst_single_node():
    g = WeightedGraph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    t = mst(metric_closure(g, [1]))
    assert t.edges == [] and t.total == 0


def test_mst_empty_set():
    g = WeightedGraph.from_edges(2, [(0, 1, 1)])
    with pytest.raises(GraphError):
        mst(metric_closure(g, []))


def test_mst_tie_break_by_edge_key():
    # triangle of equal costs keeps (0,1) and (0,2)
    g = WeightedGraph.from_edges(3, [(1, 2, 1), (0, 2, 1), (0, 1, 1)])
    t = mst(metric_closure(g, range(3)))
    assert sorted((e.u, e.v) for e in t.edges) == [(0, 1), (0, 2)]


def test_mst_of_prediction_is_dash_cycle(hard10):
    g, _, pred = hard10
    t = mst(metric_closure(g, pred.nodes))
    assert t.total == 9
    assert all(e.cost == 1.0 for e in t.edges)


def test_tree_path_star():
    g = WeightedGraph.from_edges(3, [(0, 1, 1), (0, 2, 1)])
    t = mst(g)
    assert [(e.u, e.v) for e in tree_path(t, 1, 2)] == [(1, 0), (0, 2)]
    assert tree_path(t, 1, 1) == []


def test_tree_path_missing_node():
    g = WeightedGraph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    t = mst(metric_closure(g, [0, 1]))
    with pytest.raises(GraphError):
        tree_path(t, 0, 2)


def test_tree_path_hard_instance(hard10):
    g, _, pred = hard10
    t = mst(metric_closure(g, pred.nodes))
    path = tree_path(t, 9, 0)
    assert len(path) == 9
    assert [e.u for e in path] == [9, 10, 11, 12, 13, 14, 15, 16, 17]
    assert path[-1].v == 0


def test_radius_path():
    g = WeightedGraph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    assert graph_radius(g) == 1


def test_radius_single_node():
    assert graph_radius(WeightedGraph.from_edges(1, [])) == 0


def test_radius_matches_networkx_apsp():
    g = gen_connected_graph(10, 12, seed=3)
    h = nx.Graph()
    h.add_weighted_edges_from(g.edges())
    d = dict(nx.all_pairs_dijkstra_path_length(h))
    expected = min(max(d[v].values()) for v in h)
    assert graph_radius(g) == expected == 19.0
    assert graph_radius(g, MetricView(g)) == expected


def test_radius_disconnected():
    with pytest.raises(UnreachableError):
        graph_radius(WeightedGraph.from_edges(3, [(0, 1, 1)]))


def test_metric_view_is_thread_safe():
    g = gen_connected_graph(60, 120, seed=1)
    view = MetricView(g)
    out = {}

    def work(i):
        out[i] = view.distances(i % 5).copy()

    threads = [threading.Thread(target=work, args=(i,)) for i in range(20)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    ref = MetricView(g)
    for i, d in out.items():
        np.testing.assert_array_equal(d, ref.distances(i % 5))


@st.composite
def small_graphs(draw):
    n = draw(st.integers(2, 9))
    seed = draw(st.integers(0, 10_000))
    extra = draw(st.integers(0, 2 * n))
    return gen_connected_graph(n, extra, seed=seed)


@settings(max_examples=40, deadline=None)
@given(small_graphs())
def test_triangle_inequality(g):
    view = MetricView(g)
    d = np.vstack([view.distances(u) for u in range(g.n)])
    assert np.all(d[:, None, :] <= d[:, :, None] + d[None, :, :] + 1e-9)


@settings(max_examples=40, deadline=None)
@given(small_graphs())
def test_witness_paths_sum_to_distance(g):
    view = MetricView(g)
    for u, v in itertools.combinations(range(g.n), 2):
        path = view.path(u, v)
        assert sum(w for *_, w in path) == view.dist(u, v)
        for a, b, w in path:
            assert g.edge_cost(a, b) == w


@settings(max_examples=30, deadline=None)
@given(small_graphs(), st.randoms(use_true_random=False))
def test_mst_total_invariant_under_permutation(g, rnd):
    edges = g.edges()
    rnd.shuffle(edges)
    shuffled = WeightedGraph.from_edges(g.n, edges)
    assert mst(shuffled).total == mst(g).total


def test_cycle_property_on_random_metric_graphs():
    rng = np.random.default_rng(50)
    for trial in range(50):
        n = int(rng.integers(3, 13))
        g = gen_connected_graph(n, n * (n - 1) // 2, seed=trial)
        cl = metric_closure(g, range(n))
        t = mst(cl)
        tree_pairs = {(e.u, e.v) for e in t.edges} | {(e.v, e.u) for e in t.edges}
        for u, v in itertools.combinations(range(n), 2):
            if (u, v) in tree_pairs:
                continue
            assert max(e.cost for e in tree_path(t, u, v)) <= cl.weight(u, v) + 1e-9
