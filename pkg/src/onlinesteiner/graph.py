"""Weighted graphs, shortest paths, metric closure and minimum spanning trees.

Distances are computed lazily per source with scipy's Dijkstra and memoized in a
:class:`MetricView`. Predecessors are then re-derived so that, among all tight
in-edges of a node, the one from the smallest node id wins. Witness paths are
therefore deterministic and their edge costs sum exactly to the reported
distance.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, dijkstra

TOL = 1e-9

Edge = tuple[int, int, float]


class GraphError(ValueError):
    """Invalid graph construction or query."""


class UnreachableError(GraphError):
    """A required path does not exist."""


def edge_key(u: int, v: int, directed: bool = False) -> tuple[int, int]:
    if directed or u < v:
        return (u, v)
    return (v, u)


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Immutable edge store with nonnegative costs.

    Parallel edges are merged keeping the cheapest. Directed graphs carry a
    ``root`` and edges point ``tail -> head``.
    """

    n: int
    tails: np.ndarray
    heads: np.ndarray
    costs: np.ndarray
    directed: bool = False
    root: int | None = None
    coords: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Sequence[float]],
        directed: bool = False,
        root: int | None = None,
        coords: np.ndarray | None = None,
    ) -> "WeightedGraph":
        arr = np.asarray(list(edges), dtype=float).reshape(-1, 3)
        return cls.from_arrays(n, arr[:, 0], arr[:, 1], arr[:, 2], directed, root, coords)

    @classmethod
    def from_arrays(
        cls,
        n: int,
        tails,
        heads,
        costs,
        directed: bool = False,
        root: int | None = None,
        coords: np.ndarray | None = None,
    ) -> "WeightedGraph":
        n = int(n)
        if n < 1:
            raise GraphError("graph needs at least one node")
        t = np.asarray(tails, dtype=float)
        h = np.asarray(heads, dtype=float)
        c = np.asarray(costs, dtype=float)
        if not (t.shape == h.shape == c.shape):
            raise GraphError("edge arrays differ in length")
        if t.size and (np.any(t != np.floor(t)) or np.any(h != np.floor(h))):
            raise GraphError("node ids must be integers")
        t = t.astype(np.int64)
        h = h.astype(np.int64)
        if t.size and (t.min() < 0 or h.min() < 0 or t.max() >= n or h.max() >= n):
            raise GraphError(f"node id out of range [0, {n})")
        if np.any(t == h):
            raise GraphError("self-loops are not allowed")
        if np.any(~np.isfinite(c)) or np.any(c < 0):
            raise GraphError("edge costs must be finite and nonnegative")
        if directed:
            if root is None or not 0 <= root < n:
                raise GraphError("directed graph needs a valid root")
        elif root is not None:
            raise GraphError("root is only meaningful for directed graphs")
        if not directed:
            t, h = np.minimum(t, h), np.maximum(t, h)
        # merge parallel edges, keep min cost; result sorted by (tail, head)
        order = np.lexsort((c, h, t))
        t, h, c = t[order], h[order], c[order]
        if t.size:
            first = np.ones(t.size, dtype=bool)
            first[1:] = (t[1:] != t[:-1]) | (h[1:] != h[:-1])
            t, h, c = t[first], h[first], c[first]
        if coords is not None:
            coords = np.asarray(coords, dtype=float)
            if coords.shape != (n, 2):
                raise GraphError("coords must have shape (n, 2)")
        return cls(n, t, h, c, bool(directed), None if root is None else int(root), coords)

    @property
    def m(self) -> int:
        return int(self.tails.size)

    def edges(self) -> list[Edge]:
        return [(int(a), int(b), float(w)) for a, b, w in zip(self.tails, self.heads, self.costs)]

    def check_node(self, v) -> int:
        if not isinstance(v, (int, np.integer)) or not 0 <= v < self.n:
            raise GraphError(f"invalid node id {v!r}")
        return int(v)

    @cached_property
    def arcs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Directed arcs (tail, head, cost); undirected edges appear both ways."""
        if self.directed:
            return self.tails, self.heads, self.costs
        return (
            np.concatenate([self.tails, self.heads]),
            np.concatenate([self.heads, self.tails]),
            np.concatenate([self.costs, self.costs]),
        )

    @cached_property
    def csr(self) -> sp.csr_matrix:
        t, h, c = self.arcs
        # explicit zeros would be dropped by scipy; nudge them to the smallest float
        data = np.where(c == 0, np.finfo(float).tiny, c)
        return sp.csr_matrix((data, (t, h)), shape=(self.n, self.n))

    @cached_property
    def reversed_csr(self) -> sp.csr_matrix:
        return self.csr.T.tocsr()

    def reverse(self) -> "WeightedGraph":
        if not self.directed:
            return self
        return WeightedGraph.from_arrays(self.n, self.heads, self.tails, self.costs, True, self.root)

    def edge_cost(self, u: int, v: int) -> float:
        a, b = edge_key(u, v, self.directed)
        lo = np.searchsorted(self.tails, a, side="left")
        hi = np.searchsorted(self.tails, a, side="right")
        idx = lo + np.searchsorted(self.heads[lo:hi], b)
        if idx < hi and self.heads[idx] == b:
            return float(self.costs[idx])
        raise GraphError(f"no edge ({u}, {v})")

    def is_connected(self) -> bool:
        ncomp, _ = connected_components(self.csr, directed=self.directed, connection="weak")
        return ncomp == 1

    def components(self) -> np.ndarray:
        _, labels = connected_components(self.csr, directed=False)
        return labels

    def subgraph(self, nodes: Sequence[int]) -> tuple["WeightedGraph", np.ndarray]:
        """Induced subgraph on ``nodes`` with ids compacted in ascending order."""
        keep = np.unique(np.asarray(nodes, dtype=np.int64))
        remap = np.full(self.n, -1, dtype=np.int64)
        remap[keep] = np.arange(keep.size)
        mask = (remap[self.tails] >= 0) & (remap[self.heads] >= 0)
        coords = None if self.coords is None else self.coords[keep]
        root = None
        if self.directed:
            if self.root is None or remap[self.root] < 0:
                raise GraphError("subgraph must keep the root")
            root = int(remap[self.root])
        g = WeightedGraph.from_arrays(
            keep.size, remap[self.tails[mask]], remap[self.heads[mask]], self.costs[mask],
            self.directed, root, coords,
        )
        return g, keep

    def nodes_reaching_root(self) -> np.ndarray:
        """Boolean mask of nodes with a directed path to the root."""
        if not self.directed:
            raise GraphError("graph is undirected")
        dist = dijkstra(self.reversed_csr, indices=self.root)
        return np.isfinite(dist)


class _SourceTree:
    __slots__ = ("dist", "pred", "pred_cost")

    def __init__(self, dist: np.ndarray, pred: np.ndarray, pred_cost: np.ndarray):
        self.dist = dist
        self.pred = pred
        self.pred_cost = pred_cost


class MetricView:
    """Shortest-path metric over ``base``, one Dijkstra per queried source.

    With ``reverse=True`` distances follow arcs backwards, so ``dist(r, t)`` is
    the cost of the cheapest ``t -> r`` path in the base graph.
    """

    def __init__(self, base: WeightedGraph, reverse: bool = False):
        self.base = base
        self.reverse = reverse and base.directed
        self._trees: dict[int, _SourceTree] = {}
        self._lock = threading.Lock()

    @cached_property
    def _arcs(self):
        t, h, c = self.base.arcs
        return (h, t, c) if self.reverse else (t, h, c)

    @cached_property
    def _arc_index(self) -> tuple[np.ndarray, np.ndarray]:
        tails, heads, costs = self._arcs
        key = tails.astype(np.int64) * self.base.n + heads
        order = np.argsort(key, kind="stable")
        return key[order], costs[order]

    def _arc_costs(self, pred: np.ndarray, mask: np.ndarray) -> np.ndarray:
        """Cost of arc ``pred[v] -> v`` for every ``v`` in ``mask``."""
        keys, costs = self._arc_index
        vs = np.flatnonzero(mask)
        return costs[np.searchsorted(keys, pred[vs].astype(np.int64) * self.base.n + vs)]

    def _compute(self, s: int) -> _SourceTree:
        g = self.base
        mat = g.reversed_csr if self.reverse else g.csr
        dist, scipy_pred = dijkstra(mat, indices=s, return_predecessors=True)
        tails, heads, costs = self._arcs
        if self._has_zero:
            # tiny stand-ins for zero costs leak into scipy's sums; re-add true costs
            dist = self._exact_distances(s, scipy_pred)
        pred = np.full(g.n, g.n, dtype=np.int64)
        tight = (costs > 0) & np.isfinite(dist[tails]) & (dist[tails] + costs == dist[heads])
        np.minimum.at(pred, heads[tight], tails[tight])
        missing = (pred == g.n) & (scipy_pred >= 0)
        pred[missing] = scipy_pred[missing]
        pred[pred == g.n] = -1
        pred[s] = -1
        pred_cost = np.zeros(g.n)
        has = pred >= 0
        pred_cost[has] = self._arc_costs(pred, has)
        return _SourceTree(dist, pred, pred_cost)

    @cached_property
    def _has_zero(self) -> bool:
        return bool(np.any(self.base.costs == 0))

    def _exact_distances(self, s: int, scipy_pred: np.ndarray) -> np.ndarray:
        dist = np.full(self.base.n, np.inf)
        dist[s] = 0.0
        reached = scipy_pred >= 0
        children: dict[int, list[tuple[int, float]]] = {}
        for v, w in zip(np.flatnonzero(reached).tolist(), self._arc_costs(scipy_pred, reached).tolist()):
            children.setdefault(int(scipy_pred[v]), []).append((v, w))
        stack = [s]
        while stack:
            x = stack.pop()
            for v, w in children.get(x, ()):
                dist[v] = dist[x] + w
                stack.append(v)
        return dist

    def tree(self, s: int) -> _SourceTree:
        s = self.base.check_node(s)
        with self._lock:
            st = self._trees.get(s)
            if st is None:
                st = self._compute(s)
                self._trees[s] = st
            return st

    def distances(self, s: int) -> np.ndarray:
        return self.tree(s).dist

    def dist(self, u: int, v: int) -> float:
        self.base.check_node(v)
        return float(self.tree(u).dist[v])

    def path(self, u: int, v: int) -> list[Edge]:
        """Witness path ``u -> v`` as original edges ``(a, b, cost)`` in travel order."""
        st = self.tree(u)
        v = self.base.check_node(v)
        if not np.isfinite(st.dist[v]):
            raise UnreachableError(f"node {v} unreachable from {u}")
        out: list[Edge] = []
        x = v
        while x != u:
            p = int(st.pred[x])
            out.append((p, x, float(st.pred_cost[x])))
            x = p
        out.reverse()
        if self.reverse:
            # reversed search: travel order in the base graph is v -> u
            out = [(b, a, w) for a, b, w in reversed(out)]
        return out

    def nearest(self, u: int, targets: Iterable[int]) -> tuple[int, float]:
        """Closest target to ``u``; ties go to the smallest id."""
        tgt = np.fromiter(targets, dtype=np.int64)
        if tgt.size == 0:
            raise GraphError("no targets")
        tgt.sort()
        d = self.distances(u)[tgt]
        i = int(np.argmin(d))
        if not np.isfinite(d[i]):
            raise UnreachableError(f"no target reachable from {u}")
        return int(tgt[i]), float(d[i])

    def matrix(self, nodes: Sequence[int]) -> np.ndarray:
        nodes = list(nodes)
        return np.array([self.distances(u)[nodes] for u in nodes]).reshape(len(nodes), len(nodes))


def shortest_path(g: WeightedGraph, u: int, v: int) -> tuple[float, list[Edge]]:
    """Cheapest ``u -> v`` path. Returns ``(inf, [])`` when unreachable."""
    g.check_node(u)
    g.check_node(v)
    mv = MetricView(g)
    d = mv.dist(u, v)
    if not np.isfinite(d):
        return float("inf"), []
    return d, mv.path(u, v)


@dataclass
class MetricClosure:
    """Complete graph over ``nodes`` weighted by shortest-path distance."""

    nodes: tuple[int, ...]
    weights: np.ndarray
    view: MetricView

    def weight(self, u: int, v: int) -> float:
        idx = {x: i for i, x in enumerate(self.nodes)}
        return float(self.weights[idx[u], idx[v]])

    def witness(self, u: int, v: int) -> list[Edge]:
        return self.view.path(u, v)


def metric_closure(g: WeightedGraph, s: Iterable[int], view: MetricView | None = None) -> MetricClosure:
    nodes = tuple(sorted({g.check_node(x) for x in s}))
    view = view or MetricView(g)
    w = view.matrix(nodes)
    if not np.all(np.isfinite(w)):
        i, j = map(int, np.argwhere(~np.isfinite(w))[0])
        raise UnreachableError(f"nodes {nodes[i]} and {nodes[j]} are disconnected")
    return MetricClosure(nodes, w, view)


@dataclass(frozen=True)
class TreeEdge:
    u: int
    v: int
    cost: float
    path: tuple[Edge, ...]


@dataclass
class Tree:
    """Undirected tree; each edge keeps its witness path in the base graph."""

    nodes: frozenset[int]
    edges: list[TreeEdge]

    def __post_init__(self):
        self._adj: dict[int, list[tuple[int, TreeEdge]]] = {x: [] for x in self.nodes}
        for e in self.edges:
            self._adj[e.u].append((e.v, e))
            self._adj[e.v].append((e.u, e))

    @property
    def total(self) -> float:
        return float(sum(e.cost for e in self.edges))

    def neighbors(self, x: int) -> list[tuple[int, TreeEdge]]:
        return self._adj[x]

    def distances_from(self, u: int) -> dict[int, float]:
        if u not in self.nodes:
            raise GraphError(f"node {u} not in tree")
        dist = {u: 0.0}
        stack = [u]
        while stack:
            x = stack.pop()
            for y, e in self._adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + e.cost
                    stack.append(y)
        return dist


def tree_path(t: Tree, u: int, v: int) -> list[TreeEdge]:
    """Unique ``u``-``v`` path in ``t``, edges oriented from ``u``."""
    for x in (u, v):
        if x not in t.nodes:
            raise GraphError(f"node {x} not in tree")
    if u == v:
        return []
    parent: dict[int, tuple[int, TreeEdge] | None] = {u: None}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        if x == v:
            break
        for y, e in t.neighbors(x):
            if y not in parent:
                parent[y] = (x, e)
                queue.append(y)
    if v not in parent:
        raise GraphError(f"{u} and {v} are not connected in tree")
    out: list[TreeEdge] = []
    x = v
    while parent[x] is not None:
        p, e = parent[x]
        out.append(e if e.u == p else TreeEdge(p, x, e.cost, tuple((b, a, w) for a, b, w in reversed(e.path))))
        x = p
    out.reverse()
    return out


class UnionFind:
    def __init__(self, items: Iterable[int] = ()):
        self.parent: dict[int, int] = {x: x for x in items}

    def find(self, a: int) -> int:
        parent = self.parent
        if a not in parent:
            parent[a] = a
            return a
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        # smaller root wins; keeps component labels deterministic
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def _kruskal(nodes: Sequence[int], us: np.ndarray, vs: np.ndarray, ws: np.ndarray) -> list[int]:
    lo, hi = np.minimum(us, vs), np.maximum(us, vs)
    order = np.lexsort((hi, lo, ws))
    uf = UnionFind(nodes)
    chosen: list[int] = []
    need = len(nodes) - 1
    for i in order.tolist():
        if uf.union(int(us[i]), int(vs[i])):
            chosen.append(i)
            if len(chosen) == need:
                break
    return chosen


def mst(x: MetricClosure | WeightedGraph) -> Tree:
    """Minimum spanning tree, ties broken by cost then ``(min id, max id)``.

    Accepts a metric closure (edges carry witness paths) or an undirected graph.
    """
    if isinstance(x, MetricClosure):
        nodes = x.nodes
        if not nodes:
            raise GraphError("empty node set")
        ii, jj = np.triu_indices(len(nodes), k=1)
        arr = np.asarray(nodes, dtype=np.int64)
        us, vs, ws = arr[ii], arr[jj], x.weights[ii, jj]
        chosen = _kruskal(nodes, us, vs, ws)
        edges = [
            TreeEdge(int(us[i]), int(vs[i]), float(ws[i]), tuple(x.witness(int(us[i]), int(vs[i]))))
            for i in chosen
        ]
        return Tree(frozenset(nodes), edges)
    if x.directed:
        raise GraphError("mst needs an undirected graph")
    nodes = tuple(range(x.n))
    chosen = _kruskal(nodes, x.tails, x.heads, x.costs)
    if len(chosen) != x.n - 1:
        raise UnreachableError("graph is disconnected")
    edges = [
        TreeEdge(int(x.tails[i]), int(x.heads[i]), float(x.costs[i]),
                 ((int(x.tails[i]), int(x.heads[i]), float(x.costs[i])),))
        for i in chosen
    ]
    return Tree(frozenset(nodes), edges)


def all_pairs(g: WeightedGraph) -> np.ndarray:
    """Full distance matrix; only for graphs small enough to afford it."""
    view = MetricView(g)
    return np.vstack([view.distances(u) for u in range(g.n)])


def graph_radius(g: WeightedGraph, view: MetricView | None = None) -> float:
    """Eccentricity of a center: ``min_v max_u dist(v, u)``."""
    if g.directed:
        raise GraphError("radius is defined for undirected graphs")
    if g.n == 1:
        return 0.0
    if view is None:
        d = dijkstra(g.csr, directed=False)
        # zero-cost stand-ins are below any meaningful tolerance
        d = np.where(d < 1e-300, 0.0, d)
    else:
        d = np.vstack([view.distances(u) for u in range(g.n)])
    if not np.all(np.isfinite(d)):
        raise UnreachableError("graph is disconnected")
    return float(d.max(axis=1).min())
