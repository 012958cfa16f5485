"""Prediction error, synthetic predictions, terminal learning and greedy clustering."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .graph import GraphError, MetricView, WeightedGraph, graph_radius
from .plan import OnlineInstance, PredictionSet, PurchasePlan

THETA_GRID = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)


def prediction_error(actual: Iterable[int], pred: PredictionSet | Iterable[int]) -> int:
    """``max(|pred|, |actual|) - |pred & actual|``."""
    a = set(actual)
    p = set(pred.nodes if isinstance(pred, PredictionSet) else pred)
    return max(len(a), len(p)) - len(a & p)


def mix_prediction(
    actual: Sequence[int], universe: Sequence[int], accuracy: float, seed=None
) -> PredictionSet:
    """``floor(k*accuracy)`` true terminals plus the rest drawn from non-terminals."""
    if not 0.0 <= accuracy <= 1.0:
        raise ValueError("accuracy must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    actual = np.unique(np.asarray(actual, dtype=np.int64))
    k = actual.size
    # guard against k*accuracy landing just under an integer, e.g. 0.29*100
    good = min(k, math.floor(k * accuracy + 1e-9))
    others = np.setdiff1d(np.asarray(universe, dtype=np.int64), actual)
    if others.size < k - good:
        raise GraphError("universe too small for the requested error")
    right = rng.choice(actual, size=good, replace=False)
    wrong = rng.choice(others, size=k - good, replace=False)
    return PredictionSet.of(np.concatenate([right, wrong]).tolist())


@dataclass
class FrequencyTable:
    counts: dict[int, int]
    s: int

    @classmethod
    def from_samples(cls, samples: Sequence[Iterable[int]]) -> "FrequencyTable":
        if not samples:
            raise ValueError("need at least one training sample")
        counts: Counter[int] = Counter()
        for sample in samples:
            counts.update(set(sample))
        return cls(dict(counts), len(samples))

    def f(self, v: int) -> int:
        return self.counts.get(v, 0)

    def candidate(self, theta: float, rng: np.random.Generator) -> PredictionSet:
        """Each ``v`` with ``f(v) > theta*s`` is kept with probability ``f(v)/s``."""
        nodes = sorted(v for v, c in self.counts.items() if c > theta * self.s + 1e-9)
        if not nodes:
            return PredictionSet()
        probs = np.array([self.counts[v] for v in nodes], dtype=float) / self.s
        keep = rng.random(len(nodes)) < probs
        return PredictionSet.of(np.asarray(nodes)[keep].tolist())


@dataclass
class LearnedPrediction:
    prediction: PredictionSet
    theta: float
    costs: dict[float, float]


Runner = Callable[[OnlineInstance, PredictionSet], PurchasePlan]


def learn_terminals(
    samples: Sequence[Sequence[int]],
    graph: WeightedGraph,
    algo: Runner,
    seed=None,
    thetas: Sequence[float] = THETA_GRID,
) -> LearnedPrediction:
    """Pick the threshold whose sampled prediction serves one training instance best.

    One training instance is drawn uniformly and arrives in a random order; every
    threshold's candidate is scored on that same instance. Ties go to the
    smaller threshold.
    """
    table = FrequencyTable.from_samples(samples)
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    pick_seq, *theta_seqs = root.spawn(1 + len(thetas))
    pick_rng = np.random.default_rng(pick_seq)
    chosen = samples[int(pick_rng.integers(len(samples)))]
    order = tuple(int(x) for x in pick_rng.permutation(np.asarray(sorted(set(chosen)), dtype=np.int64)))
    inst = OnlineInstance(graph, order)
    best: tuple[float, float, PredictionSet] | None = None
    costs: dict[float, float] = {}
    for theta, seq in zip(thetas, theta_seqs):
        cand = table.candidate(theta, np.random.default_rng(seq))
        cost = algo(inst, cand).total
        costs[theta] = cost
        if best is None or cost < best[0]:
            best = (cost, theta, cand)
    return LearnedPrediction(best[2], best[1], costs)


@dataclass
class Clustering:
    clusters: list[tuple[int, frozenset[int]]]
    sigma: float
    radius_used: float

    def labels(self, n: int) -> np.ndarray:
        out = np.full(n, -1, dtype=np.int64)
        for i, (_, members) in enumerate(self.clusters):
            out[list(members)] = i
        return out


def greedy_cluster(
    g: WeightedGraph, sigma: float, view: MetricView | None = None, radius: float | None = None
) -> Clustering:
    """Farthest-first clustering with cluster radius at most ``sigma * radius(g)``.

    The next center is the unassigned node farthest from the chosen centers
    (smallest id on ties, so the first center is node 0). It absorbs every
    unassigned node within the threshold.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    view = view or MetricView(g)
    r = graph_radius(g) if radius is None else radius
    limit = sigma * r
    unassigned = np.ones(g.n, dtype=bool)
    to_centers = np.zeros(g.n)
    first = True
    clusters = []
    while unassigned.any():
        cand = np.flatnonzero(unassigned)
        v = int(cand[np.argmax(to_centers[cand])])
        d = view.distances(v)
        members = np.flatnonzero(unassigned & (d <= limit))
        unassigned[members] = False
        clusters.append((v, frozenset(members.tolist())))
        to_centers = d.copy() if first else np.minimum(to_centers, d)
        first = False
    return Clustering(clusters, sigma, r)


def sample_clustered_terminals(cl: Clustering, x: int, budget: int, seed=None) -> list[int]:
    """``budget // x`` distinct clusters of size >= x, ``x`` members from each."""
    if x < 1:
        raise ValueError("x must be positive")
    rng = np.random.default_rng(seed)
    count = budget // x
    eligible = [i for i, (_, m) in enumerate(cl.clusters) if len(m) >= x]
    if len(eligible) < count:
        raise GraphError(f"only {len(eligible)} clusters with >= {x} nodes, need {count}")
    picked = rng.choice(eligible, size=count, replace=False)
    out: list[int] = []
    for i in sorted(picked.tolist()):
        members = np.array(sorted(cl.clusters[i][1]), dtype=np.int64)
        out.extend(rng.choice(members, size=x, replace=False).tolist())
    return sorted(out)
