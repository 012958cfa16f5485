"""Online undirected Steiner tree: greedy baseline, OAPT and IOAPT (eager and lazy)."""

from __future__ import annotations

from .graph import Edge, GraphError, MetricView, Tree, TreeEdge, metric_closure, mst, tree_path
from .plan import A1, A2, OnlineInstance, PredictionSet, PurchasePlan

FIRST, CASE1, CASE2 = 0, 1, 2


def _view(inst: OnlineInstance, view: MetricView | None) -> MetricView:
    if inst.graph.directed:
        raise GraphError("undirected algorithm on a directed graph")
    if view is None:
        return MetricView(inst.graph)
    if view.base is not inst.graph:
        raise GraphError("metric view belongs to another graph")
    return view


def _expand(path: list[TreeEdge]) -> list[Edge]:
    return [e for te in path for e in te.path]


def _connect_greedy(plan: PurchasePlan, view: MetricView, t: int, arrived: list[int], part: int) -> float:
    target, _ = view.nearest(t, arrived)
    return plan.buy(view.path(t, target), part)


def prediction_tree(inst: OnlineInstance, pred: PredictionSet, view: MetricView) -> Tree | None:
    """MST over the metric closure of the predicted terminals, or None if empty."""
    if not pred.nodes:
        return None
    pred.validate(inst.graph)
    return mst(metric_closure(inst.graph, pred.nodes, view))


def run_greedy(inst: OnlineInstance, view: MetricView | None = None) -> PurchasePlan:
    """Connect each arrival along its cheapest path to an earlier terminal."""
    view = _view(inst, view)
    plan = PurchasePlan()
    arrived: list[int] = []
    for t in inst.arrivals:
        plan.start(t, FIRST if not arrived else CASE1)
        if arrived:
            _connect_greedy(plan, view, t, arrived, A1)
        arrived.append(t)
        _assert_connected(plan, inst.arrivals[0], t)
    return plan


def run_oapt(inst: OnlineInstance, pred: PredictionSet, view: MetricView | None = None) -> PurchasePlan:
    """Online algorithm with predicted terminals.

    Unpredicted arrivals (and the first predicted one) connect greedily into A1.
    Later predicted arrivals buy the tree path in ``MST(pred)`` to the closest
    earlier predicted arrival, measured along the tree, into A2.
    """
    view = _view(inst, view)
    tree = prediction_tree(inst, pred, view)
    plan = PurchasePlan()
    arrived: list[int] = []
    arrived_pred: list[int] = []
    for t in inst.arrivals:
        if t in pred.nodes and arrived_pred:
            plan.start(t, CASE2)
            dist = tree.distances_from(t)
            target = min(arrived_pred, key=lambda x: (dist[x], x))
            plan.buy(_expand(tree_path(tree, t, target)), A2)
        else:
            plan.start(t, FIRST if not arrived else CASE1)
            if arrived:
                _connect_greedy(plan, view, t, arrived, A1)
        arrived.append(t)
        if t in pred.nodes:
            arrived_pred.append(t)
        _assert_connected(plan, inst.arrivals[0], t)
    return plan


def subpath_select(path: list, c: float) -> list:
    """Shortest prefix of ``path`` whose cost reaches ``c``.

    Items are tree edges (``.cost``) or ``(u, v, cost)`` tuples. When the whole
    path costs less than ``c`` it is returned unchanged.
    """
    if not path and c > 0:
        raise GraphError("empty path cannot cover a positive cost")
    total = 0.0
    for i, e in enumerate(path):
        if total >= c:
            return path[:i]
        total += e.cost if isinstance(e, TreeEdge) else e[2]
    return list(path)


def run_ioapt(
    inst: OnlineInstance,
    pred: PredictionSet,
    lazy: bool = False,
    view: MetricView | None = None,
) -> PurchasePlan:
    """Improved OAPT: a predicted arrival buys a tree sub-path worth ``[c, 2c]``.

    ``c`` is the cheapest metric edge ``e_i`` from the arrival to an earlier
    predicted arrival. The tree path is taken towards that edge's endpoint, so
    every tree edge on it costs at most ``c``. ``e_i`` itself is bought when the
    sub-path does not reach the arrived component. In lazy mode the sub-path is
    only reserved in that situation and paid once a later arrival connects
    through it.
    """
    view = _view(inst, view)
    tree = prediction_tree(inst, pred, view)
    plan = PurchasePlan()
    root = inst.arrivals[0]
    arrived: list[int] = []
    arrived_pred: list[int] = []
    for t in inst.arrivals:
        if t in pred.nodes and arrived_pred:
            plan.start(t, CASE2)
            target, c = view.nearest(t, arrived_pred)
            sub = _expand(subpath_select(tree_path(tree, t, target), c))
            if lazy:
                if _reaches(plan, sub, t, root):
                    plan.buy(sub, A2)
                else:
                    plan.reserve(sub)
                    plan.buy(view.path(t, target), A2)
            else:
                plan.buy(sub, A2)
                if not plan.connected(t, root):
                    plan.buy(view.path(t, target), A2)
        else:
            plan.start(t, FIRST if not arrived else CASE1)
            if arrived:
                _connect_greedy(plan, view, t, arrived, A1)
        arrived.append(t)
        if t in pred.nodes:
            arrived_pred.append(t)
        _assert_connected(plan, root, t)
    return plan


def _reaches(plan: PurchasePlan, edges: list[Edge], t: int, root: int) -> bool:
    """Would buying ``edges`` connect ``t`` to the component of ``root``?"""
    uf = plan.components
    target = uf.find(root)
    if uf.find(t) == target:
        return True
    # small union-find over component labels touched by the candidate edges
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        x = uf.find(x)
        while parent.get(x, x) != x:
            x = parent[x]
        return x

    for a, b, _ in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return find(t) == find(root)


def _assert_connected(plan: PurchasePlan, root: int, t: int) -> None:
    if not plan.connected(root, t):
        raise AssertionError(f"terminal {t} left disconnected")


ALGORITHMS = {
    "greedy": lambda inst, pred, view=None: run_greedy(inst, view),
    "oapt": lambda inst, pred, view=None: run_oapt(inst, pred, view),
    "ioapt": lambda inst, pred, view=None: run_ioapt(inst, pred, False, view),
    "ioapt-lazy": lambda inst, pred, view=None: run_ioapt(inst, pred, True, view),
}
