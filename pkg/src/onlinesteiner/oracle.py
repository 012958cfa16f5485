"""Exact offline Steiner solvers used as ground truth for competitive ratios.

``exact_steiner`` and ``exact_mdst`` run a Dreyfus-Wagner subset DP over the
shortest-path metric (the directed one on the edge-reversed graph, growing an
out-tree from the root). ``brute_force`` enumerates Steiner-point subsets and is
deliberately built on networkx so it shares no code with the DP.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

import networkx as nx
import numpy as np

from .graph import Edge, GraphError, MetricView, UnreachableError, WeightedGraph, edge_key, metric_closure, mst

MAX_UNDIRECTED_TERMINALS = 14
MAX_DIRECTED_TERMINALS = 12
MAX_BRUTE_FORCE_NODES = 9


class GuardError(GraphError):
    """Instance exceeds an exact solver's size guard."""


@dataclass
class OracleResult:
    cost: float
    tree: list[Edge]
    terminals: frozenset[int]


def _dedupe(edges: Iterable[Edge], directed: bool) -> list[Edge]:
    out: dict[tuple[int, int], float] = {}
    for a, b, w in edges:
        out.setdefault(edge_key(a, b, directed), w)
    return [(a, b, w) for (a, b), w in sorted(out.items())]


def _subset_dp(dist: np.ndarray, terms: list[int], root: int):
    """DP over terminal subsets; ``dist[v, u]`` is the cost of growing from v to u.

    Returns the value table and backpointers for reconstruction.
    """
    n = dist.shape[0]
    q = len(terms)
    size = 1 << q
    best = np.full((size, n), np.inf)
    via = np.zeros((size, n), dtype=np.int32)  # relaxation target u
    split = np.zeros((size, n), dtype=np.int32)  # sub-mask joined at u
    for i, t in enumerate(terms):
        s = 1 << i
        best[s] = dist[:, t]
        via[s] = t
    for s in range(1, size):
        if s & (s - 1) == 0:
            continue
        low = s & -s
        rest = s ^ low
        subs = []
        sub = rest
        while True:
            s1 = low | sub
            if s1 != s:
                subs.append(s1)
            if sub == 0:
                break
            sub = (sub - 1) & rest
        subs = np.array(sorted(subs), dtype=np.int64)
        joined = best[subs] + best[s ^ subs]
        pick = np.argmin(joined, axis=0)
        merge = joined[pick, np.arange(n)]
        split[s] = subs[pick]
        total = dist + merge[None, :]
        u = np.argmin(total, axis=1)
        best[s] = total[np.arange(n), u]
        via[s] = u
    return best, via, split


def _rebuild(s: int, v: int, via, split, grow) -> list[Edge]:
    out: list[Edge] = []
    stack = [(s, v)]
    while stack:
        s, v = stack.pop()
        u = int(via[s, v])
        if u != v:
            out.extend(grow(v, u))
        if s & (s - 1):
            s1 = int(split[s, u])
            stack.append((s1, u))
            stack.append((s ^ s1, u))
    return out


def _all_pairs(view: MetricView, n: int) -> np.ndarray:
    return np.vstack([view.distances(u) for u in range(n)])


def exact_steiner(g: WeightedGraph, terms: Iterable[int], view: MetricView | None = None) -> OracleResult:
    """Minimum-cost subgraph connecting ``terms`` (Steiner points allowed)."""
    if g.directed:
        raise GraphError("exact_steiner needs an undirected graph")
    tset = frozenset(g.check_node(t) for t in terms)
    if len(tset) > MAX_UNDIRECTED_TERMINALS:
        raise GuardError(f"{len(tset)} terminals exceed guard {MAX_UNDIRECTED_TERMINALS}")
    if len(tset) <= 1:
        return OracleResult(0.0, [], tset)
    view = view or MetricView(g)
    ordered = sorted(tset)
    root, rest = ordered[-1], ordered[:-1]
    dist = _all_pairs(view, g.n)
    if not np.all(np.isfinite(dist[root, ordered])):
        raise UnreachableError("terminals are disconnected")
    best, via, split = _subset_dp(dist, rest, root)
    full = (1 << len(rest)) - 1
    edges = _dedupe(_rebuild(full, root, via, split, view.path), directed=False)
    cost = float(sum(w for _, _, w in edges))
    _check_value(cost, best[full, root])
    return OracleResult(cost, edges, tset)


def exact_mdst(g: WeightedGraph, terms: Iterable[int], view: MetricView | None = None) -> OracleResult:
    """Cheapest edge set giving every terminal a directed path to the root."""
    if not g.directed:
        raise GraphError("exact_mdst needs a directed graph")
    r = g.root
    tset = frozenset(g.check_node(t) for t in terms)
    rest = sorted(tset - {r})
    if len(rest) > MAX_DIRECTED_TERMINALS:
        raise GuardError(f"{len(rest)} terminals exceed guard {MAX_DIRECTED_TERMINALS}")
    if not rest:
        return OracleResult(0.0, [], tset)
    view = view or MetricView(g)
    forward = _all_pairs(view, g.n)
    if not np.all(np.isfinite(forward[rest, r])):
        raise UnreachableError("a terminal cannot reach the root")
    # grow an out-tree from r in the reversed graph: cost v -> u is d(u -> v)
    best, via, split = _subset_dp(forward.T.copy(), rest, r)
    full = (1 << len(rest)) - 1
    edges = _dedupe(_rebuild(full, r, via, split, lambda v, u: view.path(u, v)), directed=True)
    cost = float(sum(w for _, _, w in edges))
    _check_value(cost, best[full, r])
    return OracleResult(cost, edges, tset)


def _check_value(cost: float, dp_value: float) -> None:
    if not np.isfinite(dp_value):
        raise UnreachableError("terminals cannot be connected")
    if abs(cost - dp_value) > 1e-9 * max(1.0, dp_value):
        raise AssertionError(f"reconstructed tree costs {cost}, DP value {dp_value}")


def _nx_graph(g: WeightedGraph) -> nx.Graph:
    h = nx.DiGraph() if g.directed else nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_weighted_edges_from(g.edges())
    return h


def brute_force(g: WeightedGraph, terms: Iterable[int], root: int | None = None) -> OracleResult:
    """Exhaustive optimum over all Steiner-point subsets.

    Undirected: MST of the induced metric per subset. Directed: minimum
    arborescence into ``root`` on the induced metric per subset.
    """
    if g.n > MAX_BRUTE_FORCE_NODES:
        raise GuardError(f"brute force limited to {MAX_BRUTE_FORCE_NODES} nodes")
    tset = frozenset(g.check_node(t) for t in terms)
    h = _nx_graph(g)
    dist, paths = _nx_all_paths(h)
    if g.directed:
        root = g.root if root is None else root
        return _brute_directed(g, h, dist, paths, tset, root)
    return _brute_undirected(g, dist, paths, tset)


def _nx_all_paths(h):
    lengths = {}
    paths = {}
    for s, (d, p) in nx.all_pairs_dijkstra(h, weight="weight"):
        lengths[s] = d
        paths[s] = p
    return lengths, paths


def _path_edges(h_paths, u, v, g: WeightedGraph) -> list[Edge]:
    nodes = h_paths[u][v]
    return [(a, b, g.edge_cost(a, b)) for a, b in zip(nodes, nodes[1:])]


def _brute_undirected(g, dist, paths, tset) -> OracleResult:
    if len(tset) <= 1:
        return OracleResult(0.0, [], tset)
    t0 = min(tset)
    if any(t not in dist[t0] for t in tset):
        raise UnreachableError("terminals are disconnected")
    others = [v for v in range(g.n) if v not in tset and v in dist[t0]]
    best = None
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            nodes = sorted(tset | set(extra))
            k = nx.Graph()
            for a, b in itertools.combinations(nodes, 2):
                k.add_edge(a, b, weight=dist[a][b])
            span = nx.minimum_spanning_tree(k, weight="weight")
            edges = _dedupe(
                (e for a, b in span.edges() for e in _path_edges(paths, a, b, g)), directed=False
            )
            cost = float(sum(w for _, _, w in edges))
            if best is None or cost < best.cost:
                best = OracleResult(cost, edges, tset)
    return best


def _brute_directed(g, h, dist, paths, tset, root) -> OracleResult:
    need = tset - {root}
    if not need:
        return OracleResult(0.0, [], tset)
    if any(root not in dist[t] for t in need):
        raise UnreachableError("a terminal cannot reach the root")
    others = [v for v in range(g.n) if v not in need and v != root]
    best = None
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            nodes = sorted(need | set(extra) | {root})
            # arborescence out of root over reversed metric arcs
            k = nx.DiGraph()
            k.add_nodes_from(nodes)
            for u in nodes:
                for v in nodes:
                    # reversed arc v -> u stands for the path u -> v
                    if u != v and u != root and v in dist[u]:
                        k.add_edge(v, u, weight=dist[u][v])
            try:
                arb = nx.minimum_spanning_arborescence(k, attr="weight", preserve_attrs=True)
            except nx.NetworkXException:
                continue
            edges = _dedupe(
                (e for v, u in arb.edges() for e in _path_edges(paths, u, v, g)), directed=True
            )
            cost = float(sum(w for _, _, w in edges))
            if best is None or cost < best.cost:
                best = OracleResult(cost, edges, tset)
    if best is None:
        raise UnreachableError("no arborescence found")
    return best


def opt_lower_bound(g: WeightedGraph, terms: Iterable[int], view: MetricView | None = None) -> float:
    """Half the metric MST over ``terms``; never exceeds the optimum."""
    if g.directed:
        raise GraphError("lower bound is for undirected graphs")
    tset = sorted(set(terms))
    if len(tset) <= 1:
        return 0.0
    return mst(metric_closure(g, tset, view)).total / 2.0
