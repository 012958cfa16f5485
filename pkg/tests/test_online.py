from __future__ import annotations

import numpy as np
import pytest

from onlinesteiner.generators import gen_connected_graph, random_order, uniform_terminals
from onlinesteiner.graph import GraphError, MetricView, UnreachableError, WeightedGraph, metric_closure, mst
from onlinesteiner.online import ALGORITHMS, CASE1, CASE2, run_greedy, run_ioapt, run_oapt, subpath_select
from onlinesteiner.oracle import exact_steiner
from onlinesteiner.plan import InfeasiblePlanError, OnlineInstance, PredictionSet, PurchasePlan, verify_plan
from onlinesteiner.predictions import mix_prediction


def _random_case(seed, n_lo=22, n_hi=40):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_lo, n_hi))
    g = gen_connected_graph(n, n, seed=seed)
    k = int(rng.integers(2, 11))
    terms = uniform_terminals(n, k, rng)
    inst = OnlineInstance(g, random_order(terms, rng))
    pred = mix_prediction(terms, range(n), float(rng.choice([0.0, 0.3, 0.5, 0.8, 1.0])), rng)
    return inst, pred


def test_instance_validation():
    g = WeightedGraph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    with pytest.raises(GraphError):
        OnlineInstance(g, ())
    with pytest.raises(GraphError):
        OnlineInstance(g, (0, 0))
    with pytest.raises(GraphError):
        OnlineInstance(g, (0, 5))


def test_greedy_single_terminal(path_abc):
    assert run_greedy(OnlineInstance(path_abc, (1,))).total == 0


def test_greedy_unique_route(path_abc):
    plan = run_greedy(OnlineInstance(path_abc, (0, 2)))
    assert plan.total == 5
    assert plan.edge_list() == [(0, 1, 2.0), (1, 2, 3.0)]


def test_greedy_hard_instance(hard10):
    _, inst, _ = hard10
    assert run_greedy(inst).total == 1.140625


def test_greedy_unreachable():
    g = WeightedGraph.from_edges(3, [(0, 1, 1)])
    with pytest.raises(UnreachableError):
        run_greedy(OnlineInstance(g, (0, 2)))


def test_oapt_empty_prediction_matches_greedy():
    for seed in range(10):
        inst, _ = _random_case(seed)
        a, b = run_oapt(inst, PredictionSet()), run_greedy(inst)
        assert a.total == b.total
        assert a.edge_list() == b.edge_list()
        assert a.deltas == b.deltas


def test_oapt_single_terminal_perfect_prediction(path_abc):
    assert run_oapt(OnlineInstance(path_abc, (2,)), PredictionSet.of([2])).total == 0


def test_oapt_hard_instance(hard10):
    _, inst, pred = hard10
    plan = run_oapt(inst, pred)
    assert plan.total == 9.125
    assert plan.a2_cost == 9.0
    assert plan.a1_cost == 0.125
    assert plan.total / 1.140625 == 8.0


def test_oapt_first_predicted_arrival_is_case1():
    g = WeightedGraph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    plan = run_oapt(OnlineInstance(g, (0, 2)), PredictionSet.of([2]))
    assert plan.steps[1].case == CASE1


def test_ioapt_empty_prediction_matches_greedy():
    for seed in range(10):
        inst, _ = _random_case(seed)
        for lazy in (False, True):
            assert run_ioapt(inst, PredictionSet(), lazy).edge_list() == run_greedy(inst).edge_list()


def test_ioapt_hard_instance_eager(hard10):
    _, inst, pred = hard10
    plan = run_ioapt(inst, pred)
    assert plan.total == 3.140625
    step = plan.steps[1]
    assert step.case == CASE2
    # two dash edges plus the direct edge e_i
    assert step.paid == 3.015625
    assert sorted(step.bought) == [(0, 9, 1.015625), (9, 10, 1.0), (10, 11, 1.0)]


def test_ioapt_hard_instance_lazy(hard10):
    _, inst, pred = hard10
    plan = run_ioapt(inst, pred, lazy=True)
    assert plan.total == 1.140625
    assert sorted(plan.reserved) == [(9, 10), (10, 11)]


def test_subpath_select_examples():
    ones = [(i, i + 1, 1.0) for i in range(9)]
    assert subpath_select(ones, 1.015625) == ones[:2]
    assert subpath_select([(0, 1, 5.0)], 5.0) == [(0, 1, 5.0)]
    assert subpath_select([(0, 1, 1.0), (1, 2, 1.0)], 3.0) == [(0, 1, 1.0), (1, 2, 1.0)]


def test_subpath_select_empty_path():
    assert subpath_select([], 0.0) == []
    with pytest.raises(GraphError):
        subpath_select([], 1.0)


def test_subpath_total_in_band_when_edges_bounded():
    rng = np.random.default_rng(4)
    for _ in range(200):
        c = float(rng.uniform(1, 10))
        path = [(i, i + 1, float(rng.uniform(0, c))) for i in range(int(rng.integers(1, 12)))]
        total = sum(w for *_, w in subpath_select(path, c))
        full = sum(w for *_, w in path)
        assert total == full or c <= total <= 2 * c


def test_feasibility_and_ledger_on_random_instances():
    for seed in range(60):
        inst, pred = _random_case(seed)
        view = MetricView(inst.graph)
        for name, algo in ALGORITHMS.items():
            plan = algo(inst, pred, view)
            verify_plan(plan, inst)
            assert plan.total == pytest.approx(sum(plan.bought.values()), abs=1e-9)


def test_online_cost_at_least_oracle():
    for seed in range(15):
        inst, pred = _random_case(seed)
        opt = exact_steiner(inst.graph, inst.arrivals).cost
        for algo in ALGORITHMS.values():
            assert algo(inst, pred).total >= opt - 1e-9


def test_ioapt_case2_delta_at_most_three_c():
    for seed in range(80):
        inst, pred = _random_case(seed)
        view = MetricView(inst.graph)
        plan = run_ioapt(inst, pred, view=view)
        arrived_pred = []
        for step in plan.steps:
            if step.case == CASE2:
                _, c = view.nearest(step.terminal, arrived_pred)
                assert step.paid <= 3 * c + 1e-9
            if step.terminal in pred:
                arrived_pred.append(step.terminal)


def test_oapt_perfect_prediction_within_mst():
    for seed in range(40):
        inst, _ = _random_case(seed)
        pred = PredictionSet.of(inst.arrivals)
        bound = mst(metric_closure(inst.graph, inst.arrivals)).total
        assert run_oapt(inst, pred).total <= bound + 1e-9


def test_lazy_usually_not_worse_than_eager():
    worse = []
    for seed in range(200):
        inst, pred = _random_case(seed)
        view = MetricView(inst.graph)
        if run_ioapt(inst, pred, True, view).total > run_ioapt(inst, pred, False, view).total + 1e-9:
            worse.append(seed)
    # lazy and eager diverge once a reservation replaces a purchase, so "never worse"
    # is not a theorem; seed 79 is the one frozen counterexample in this range
    assert worse == [79]


def test_lazy_counterexample_trace():
    inst, pred = _random_case(79)
    eager, lazy = run_ioapt(inst, pred), run_ioapt(inst, pred, lazy=True)
    assert (eager.total, lazy.total) == (98.0, 102.0)
    # eager already owns (5, 20) when terminal 20 arrives; lazy only reserved it
    assert (5, 20) in lazy.reserved


def test_verify_plan_catches_disconnection(path_abc):
    inst = OnlineInstance(path_abc, (0, 2))
    plan = PurchasePlan()
    plan.start(0, 0)
    plan.start(2, 1)
    plan.buy([(0, 1, 2.0)], 1)
    with pytest.raises(InfeasiblePlanError):
        verify_plan(plan, inst)


def test_verify_plan_catches_wrong_cost(path_abc):
    inst = OnlineInstance(path_abc, (0, 1))
    plan = PurchasePlan()
    plan.start(0, 0)
    plan.start(1, 1)
    plan.buy([(0, 1, 1.0)], 1)
    with pytest.raises(InfeasiblePlanError):
        verify_plan(plan, inst)


def test_undirected_algorithms_reject_digraph():
    g = WeightedGraph.from_edges(2, [(1, 0, 2)], directed=True, root=0)
    with pytest.raises(GraphError):
        run_greedy(OnlineInstance(g, (0, 1)))
