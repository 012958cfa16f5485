"""Online directed Steiner tree with predicted terminals and a doubling cost guess."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .graph import Edge, GraphError, MetricView, UnreachableError, WeightedGraph
from .oracle import MAX_DIRECTED_TERMINALS, GuardError, OracleResult, exact_mdst
from .plan import A1, A2, OnlineInstance, PredictionSet, PurchasePlan


@dataclass
class Epoch:
    lam: float
    members: frozenset[int]
    mdst: OracleResult


@dataclass
class DirectedRunState:
    """``lam`` is the current guess (a power of two), ``beta`` the largest
    terminal-to-root cost seen so far."""

    lam: float = 1.0
    beta: float = 0.0
    epochs: list[Epoch] = field(default_factory=list)
    lam_history: list[float] = field(default_factory=lambda: [1.0])

    @property
    def current(self) -> Epoch:
        return self.epochs[-1]


@dataclass
class DirectedPlan(PurchasePlan):
    state: DirectedRunState = field(default_factory=DirectedRunState)


def root_costs(g: WeightedGraph, view: MetricView | None = None) -> np.ndarray:
    """Shortest ``v -> root`` cost for every node (inf when unreachable)."""
    if not g.directed or g.root is None:
        raise GraphError("directed graph with root required")
    view = view or MetricView(g, reverse=True)
    return view.distances(g.root)


def t_hat_lambda(pred: PredictionSet, g: WeightedGraph, lam: float, to_root: np.ndarray | None = None) -> frozenset[int]:
    """Predicted terminals whose cheapest path to the root costs at most ``lam``."""
    if to_root is None:
        to_root = root_costs(g)
    return frozenset(t for t in pred.nodes if to_root[t] <= lam)


def _tree_path(edges: list[Edge], src: int, dst: int) -> list[Edge]:
    """Cheapest ``src -> dst`` path using only ``edges``."""
    out: dict[int, list[Edge]] = {}
    for e in edges:
        out.setdefault(e[0], []).append(e)
    dist = {src: 0.0}
    back: dict[int, Edge] = {}
    heap = [(0.0, src)]
    while heap:
        d, x = heapq.heappop(heap)
        if x == dst:
            break
        if d > dist[x]:
            continue
        for e in sorted(out.get(x, ())):
            nd = d + e[2]
            if nd < dist.get(e[1], np.inf):
                dist[e[1]] = nd
                back[e[1]] = e
                heapq.heappush(heap, (nd, e[1]))
    if dst not in dist:
        raise UnreachableError(f"{src} has no path to {dst} in the tree")
    path = []
    x = dst
    while x != src:
        e = back[x]
        path.append(e)
        x = e[0]
    path.reverse()
    return path


def run_directed(
    inst: OnlineInstance,
    pred: PredictionSet,
    membership: str = "lambda",
    view: MetricView | None = None,
    rview: MetricView | None = None,
) -> DirectedPlan:
    """Serve arrivals with paths to the root.

    Before each arrival the guess ``lam`` doubles until it covers ``beta``; on a
    change the filtered prediction and its exact minimum directed Steiner tree
    are rebuilt. Arrivals in the filtered prediction follow their tree path
    (A2), all others buy their shortest path (A1). ``membership="prediction"``
    tests against the unfiltered prediction instead.
    """
    g = inst.graph
    if not g.directed:
        raise GraphError("run_directed needs a directed graph")
    if membership not in ("lambda", "prediction"):
        raise ValueError("membership must be 'lambda' or 'prediction'")
    pred.validate(g)
    view = view or MetricView(g)
    rview = rview or MetricView(g, reverse=True)
    to_root = rview.distances(g.root)
    for t in inst.arrivals:
        if not np.isfinite(to_root[t]):
            raise UnreachableError(f"terminal {t} cannot reach the root")

    state = DirectedRunState()
    plan = DirectedPlan(directed=True, state=state)

    def open_epoch() -> None:
        members = t_hat_lambda(pred, g, state.lam, to_root)
        if state.epochs and state.current.members == members:
            tree = state.current.mdst
        else:
            if len(members - {g.root}) > MAX_DIRECTED_TERMINALS:
                raise GuardError(f"|T_hat(lambda)| = {len(members)} exceeds {MAX_DIRECTED_TERMINALS}")
            tree = exact_mdst(g, members, view)
        state.epochs.append(Epoch(state.lam, members, tree))

    open_epoch()
    for t in inst.arrivals:
        state.beta = max(state.beta, float(to_root[t]))
        if state.beta > state.lam:
            while state.beta > state.lam:
                state.lam *= 2
                state.lam_history.append(state.lam)
            open_epoch()
        if t == g.root:
            plan.start(t, 0)
            continue
        hit = t in state.current.members if membership == "lambda" else t in pred.nodes
        if hit:
            plan.start(t, 2)
            plan.buy(_tree_path(state.current.mdst.tree, t, g.root), A2)
        else:
            plan.start(t, 1)
            plan.buy(rview.path(g.root, t), A1)
    return plan
