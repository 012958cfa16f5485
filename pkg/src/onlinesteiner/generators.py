"""Instance generators: random graphs, the OAPT hard instance, terminal distributions."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .graph import GraphError, WeightedGraph
from .plan import OnlineInstance, PredictionSet


def gen_random_graph(
    n: int,
    m: int,
    cost_lo: int = 1,
    cost_hi: int = 1000,
    filler_cost: float = 100_000.0,
    seed=None,
) -> WeightedGraph:
    """``m`` uniform random edges with integer costs, every other pair at ``filler_cost``."""
    total = n * (n - 1) // 2
    if m > total:
        raise GraphError(f"m={m} exceeds n(n-1)/2={total}")
    rng = np.random.default_rng(seed)
    ii, jj = np.triu_indices(n, k=1)
    picked = rng.choice(total, size=m, replace=False)
    costs = np.full(total, float(filler_cost))
    costs[picked] = rng.integers(cost_lo, cost_hi, size=m, endpoint=True)
    return WeightedGraph.from_arrays(n, ii, jj, costs)


def gen_connected_graph(n: int, extra: int, cost_lo: int = 1, cost_hi: int = 20, seed=None) -> WeightedGraph:
    """Random spanning tree plus ``extra`` random edges, integer costs."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    edges = []
    for i in range(1, n):
        edges.append((int(order[i]), int(order[rng.integers(i)]), int(rng.integers(cost_lo, cost_hi + 1))))
    for _ in range(extra):
        a, b = rng.choice(n, size=2, replace=False)
        edges.append((int(a), int(b), int(rng.integers(cost_lo, cost_hi + 1))))
    return WeightedGraph.from_edges(n, edges)


def gen_random_digraph(
    n: int, extra: int, root: int = 0, cost_lo: int = 2, cost_hi: int = 20, seed=None
) -> WeightedGraph:
    """Random digraph where every node reaches ``root``; all costs ``> 1``."""
    rng = np.random.default_rng(seed)
    others = [v for v in rng.permutation(n).tolist() if v != root]
    placed = [root]
    edges = []
    for v in others:
        edges.append((v, int(placed[rng.integers(len(placed))]), int(rng.integers(cost_lo, cost_hi + 1))))
        placed.append(v)
    for _ in range(extra):
        a, b = rng.choice(n, size=2, replace=False)
        edges.append((int(a), int(b), int(rng.integers(cost_lo, cost_hi + 1))))
    return WeightedGraph.from_edges(n, edges, directed=True, root=root)


def gen_hard_instance(k: int) -> tuple[WeightedGraph, OnlineInstance, PredictionSet]:
    """The instance on which OAPT pays ``(k-2)`` times the optimum.

    Node ``v_i`` has id ``i-1``. Hub ``v_1`` has cheap spokes of cost
    ``1/(k-2)^2`` to ``v_2..v_{k-1}`` and an edge of cost ``1 + 1/(k-2)^2`` to
    ``v_k``; a unit-cost cycle ``v_k, v_{k+1}, .., v_{2k-2}, v_1`` closes the
    loop. Terminals are ``v_1..v_k`` and the prediction is ``v_1, v_k..v_{2k-2}``.
    """
    if k < 4:
        raise GraphError("hard instance needs k >= 4")
    eps = 1.0 / (k - 2) ** 2
    n = 2 * k - 2
    edges = [(0, i, eps) for i in range(1, k - 1)]
    edges.append((0, k - 1, 1.0 + eps))
    edges += [(i, i + 1, 1.0) for i in range(k - 1, n - 1)]
    edges.append((n - 1, 0, 1.0))
    g = WeightedGraph.from_edges(n, edges)
    arrivals = (0, k - 1, *range(1, k - 1))
    pred = PredictionSet.of([0, *range(k - 1, n)])
    return g, OnlineInstance(g, arrivals), pred


def uniform_terminals(n: int, k: int, rng: np.random.Generator) -> list[int]:
    if k > n:
        raise GraphError("k exceeds node count")
    return sorted(rng.choice(n, size=k, replace=False).tolist())


def pick_hot_set(n: int, vh_size: int, rng: np.random.Generator) -> np.ndarray:
    if vh_size > n:
        raise GraphError("hot set larger than graph")
    return np.sort(rng.choice(n, size=vh_size, replace=False))


def gen_two_class(n: int, hot: Sequence[int], k: int, rng: np.random.Generator) -> list[int]:
    """Half the terminals from the hot set, half from its complement."""
    hot = np.asarray(hot, dtype=np.int64)
    half = k // 2
    if half > hot.size:
        raise GraphError("insufficient nodes in hot set")
    rest = np.setdiff1d(np.arange(n), hot)
    if k - half > rest.size:
        raise GraphError("insufficient nodes outside hot set")
    a = rng.choice(hot, size=half, replace=False)
    b = rng.choice(rest, size=k - half, replace=False)
    return sorted(np.concatenate([a, b]).tolist())


def random_order(terminals: Sequence[int], rng: np.random.Generator) -> tuple[int, ...]:
    return tuple(int(x) for x in rng.permutation(np.asarray(terminals, dtype=np.int64)))


def gen_grid_graph(rows: int, cols: int, drop: float = 0.1, seed=None) -> WeightedGraph:
    """Jittered grid with Euclidean edge lengths; a road-network stand-in with coordinates."""
    rng = np.random.default_rng(seed)
    ids = np.arange(rows * cols).reshape(rows, cols)
    yy, xx = np.divmod(np.arange(rows * cols), cols)
    coords = np.column_stack([xx, yy]).astype(float) + rng.uniform(-0.3, 0.3, size=(rows * cols, 2))
    pairs = np.concatenate([
        np.column_stack([ids[:, :-1].ravel(), ids[:, 1:].ravel()]),
        np.column_stack([ids[:-1, :].ravel(), ids[1:, :].ravel()]),
    ])
    pairs = pairs[rng.random(len(pairs)) >= drop]
    lengths = np.linalg.norm(coords[pairs[:, 0]] - coords[pairs[:, 1]], axis=1)
    g = WeightedGraph.from_arrays(rows * cols, pairs[:, 0], pairs[:, 1], np.round(lengths * 1000), coords=coords)
    labels = g.components()
    keep = np.flatnonzero(labels == np.argmax(np.bincount(labels)))
    return g.subgraph(keep)[0]
