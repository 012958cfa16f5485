from __future__ import annotations

import math

import networkx as nx
import numpy as np
import pytest

from onlinesteiner.directed import root_costs, run_directed, t_hat_lambda
from onlinesteiner.generators import gen_random_digraph, random_order
from onlinesteiner.graph import GraphError, UnreachableError, WeightedGraph
from onlinesteiner.oracle import exact_mdst
from onlinesteiner.plan import OnlineInstance, PredictionSet, verify_plan
from onlinesteiner.predictions import mix_prediction, prediction_error


def _digraph_case(seed, k=4, n=12):
    rng = np.random.default_rng(seed)
    g = gen_random_digraph(n, 2 * n, seed=seed)
    others = np.arange(1, n)
    terms = sorted(rng.choice(others, size=k, replace=False).tolist())
    inst = OnlineInstance(g, random_order(terms, rng))
    pred = mix_prediction(terms, others, 0.5, rng)
    return g, inst, pred


def test_t_hat_lambda_zero_is_empty():
    g = gen_random_digraph(8, 10, seed=0)
    assert t_hat_lambda(PredictionSet.of(range(1, 8)), g, 0) == frozenset()


def test_t_hat_lambda_large_is_full():
    g = gen_random_digraph(8, 10, seed=0)
    pred = PredictionSet.of(range(1, 8))
    assert t_hat_lambda(pred, g, 1e9) == pred.nodes


def test_t_hat_lambda_matches_networkx_filter():
    g = gen_random_digraph(5, 5, seed=2)
    h = nx.DiGraph()
    h.add_weighted_edges_from(g.edges())
    pred = PredictionSet.of(range(5))
    for lam in (4, 8, 16, 32):
        expected = {v for v in range(5) if nx.shortest_path_length(h, v, 0, weight="weight") <= lam}
        assert t_hat_lambda(pred, g, lam) == expected
    # frozen from the filter above: distances to the root are 0, 28, 5, 8, 11
    assert t_hat_lambda(pred, g, 4) == {0}
    assert t_hat_lambda(pred, g, 8) == {0, 2, 3}


def test_t_hat_lambda_needs_root():
    g = WeightedGraph.from_edges(2, [(0, 1, 2)])
    with pytest.raises(GraphError):
        t_hat_lambda(PredictionSet(), g, 1)


def test_empty_prediction_buys_shortest_paths():
    g, inst, _ = _digraph_case(3)
    plan = run_directed(inst, PredictionSet())
    assert all(s.case == 1 for s in plan.steps)
    union = {}
    from onlinesteiner.graph import MetricView

    rv = MetricView(g, reverse=True)
    for t in inst.arrivals:
        for a, b, w in rv.path(g.root, t):
            union[(a, b)] = w
    assert plan.total == sum(union.values())


def test_single_terminal_doubling_trace():
    g = WeightedGraph.from_edges(2, [(1, 0, 5)], directed=True, root=0)
    plan = run_directed(OnlineInstance(g, (1,)), PredictionSet.of([1]))
    assert plan.state.lam_history == [1.0, 2.0, 4.0, 8.0]
    assert plan.state.current.members == {1}
    assert plan.steps[0].case == 2
    assert plan.total == 5


def test_random_digraph_cost_at_least_opt():
    g, inst, pred = _digraph_case(11, k=4, n=12)
    plan = run_directed(inst, pred)
    verify_plan(plan, inst)
    assert plan.total >= exact_mdst(g, inst.arrivals).cost - 1e-9


def test_state_invariants_on_random_digraphs():
    for seed in range(30):
        g, inst, pred = _digraph_case(seed, k=5, n=14)
        plan = run_directed(inst, pred)
        verify_plan(plan, inst)
        st = plan.state
        to_root = root_costs(g)
        assert st.beta == max(to_root[t] for t in inst.arrivals)
        assert st.lam >= st.beta
        assert st.lam < 2 * st.beta or st.lam == 1.0
        assert math.log2(st.lam).is_integer()
        assert len(st.epochs) <= 1 + math.ceil(math.log2(st.beta))
        for ep in st.epochs:
            assert ep.members == t_hat_lambda(pred, g, ep.lam, to_root)
            # shortest-path union is feasible, so MDST <= |T_hat(lam)| * lam
            assert ep.mdst.cost <= len(ep.members) * ep.lam + 1e-9


def test_filtered_tree_bound_on_random_digraphs():
    for seed in range(20):
        g, inst, pred = _digraph_case(seed, k=5, n=14)
        opt = exact_mdst(g, inst.arrivals).cost
        eta = prediction_error(inst.arrivals, pred)
        plan = run_directed(inst, pred)
        for ep in plan.state.epochs:
            assert ep.mdst.cost <= opt + ep.lam * eta + 1e-9


def test_membership_flag_is_equivalent_after_doubling():
    for seed in range(15):
        _, inst, pred = _digraph_case(seed)
        a = run_directed(inst, pred, membership="lambda")
        b = run_directed(inst, pred, membership="prediction")
        assert a.edge_list() == b.edge_list()


def test_bad_membership_flag():
    _, inst, pred = _digraph_case(0)
    with pytest.raises(ValueError):
        run_directed(inst, pred, membership="both")


def test_unreachable_terminal():
    g = WeightedGraph.from_edges(3, [(1, 0, 2), (0, 2, 2)], directed=True, root=0)
    with pytest.raises(UnreachableError):
        run_directed(OnlineInstance(g, (1, 2)), PredictionSet())


def test_root_arrival_is_free():
    g = WeightedGraph.from_edges(2, [(1, 0, 3)], directed=True, root=0)
    plan = run_directed(OnlineInstance(g, (0, 1)), PredictionSet())
    assert plan.steps[0].paid == 0 and plan.total == 3


def test_undirected_graph_rejected(path_abc):
    with pytest.raises(GraphError):
        run_directed(OnlineInstance(path_abc, (0,)), PredictionSet())
