"""DIMACS shortest-path challenge ``.gr`` / ``.co`` reader and rectangle sampling."""

from __future__ import annotations

import gzip
from pathlib import Path

import numpy as np

from .graph import GraphError, WeightedGraph


class DimacsError(GraphError):
    pass


def _open(path):
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rt")
    return open(path)


def _fail(path, lineno, msg):
    raise DimacsError(f"{path}:{lineno}: {msg}")


def read_gr(path) -> tuple[int, int, np.ndarray, np.ndarray, np.ndarray]:
    """Returns ``(n, m_header, tails, heads, costs)`` with 0-based ids."""
    n = m = None
    tails, heads, costs = [], [], []
    with _open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0] == "c":
                continue
            if parts[0] == "p":
                if len(parts) != 4 or parts[1] != "sp":
                    _fail(path, lineno, "expected 'p sp <n> <m>'")
                try:
                    n, m = int(parts[2]), int(parts[3])
                except ValueError:
                    _fail(path, lineno, "non-integer problem size")
            elif parts[0] == "a":
                if n is None:
                    _fail(path, lineno, "arc before problem line")
                if len(parts) != 4:
                    _fail(path, lineno, "expected 'a <u> <v> <w>'")
                try:
                    u, v, w = int(parts[1]), int(parts[2]), float(parts[3])
                except ValueError:
                    _fail(path, lineno, "malformed arc")
                if not (1 <= u <= n and 1 <= v <= n):
                    _fail(path, lineno, f"node id out of range 1..{n}")
                if w < 0:
                    _fail(path, lineno, "negative arc weight")
                tails.append(u - 1)
                heads.append(v - 1)
                costs.append(w)
            else:
                _fail(path, lineno, f"unknown line type {parts[0]!r}")
    if n is None:
        raise DimacsError(f"{path}: missing problem line")
    return n, m, np.array(tails, dtype=np.int64), np.array(heads, dtype=np.int64), np.array(costs)


def read_co(path, n: int) -> np.ndarray:
    coords = np.full((n, 2), np.nan)
    with _open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0] in ("c", "p"):
                continue
            if parts[0] != "v" or len(parts) != 4:
                _fail(path, lineno, "expected 'v <id> <x> <y>'")
            try:
                i, x, y = int(parts[1]), float(parts[2]), float(parts[3])
            except ValueError:
                _fail(path, lineno, "malformed coordinate line")
            if not 1 <= i <= n:
                _fail(path, lineno, f"node id out of range 1..{n}")
            coords[i - 1] = (x, y)
    if np.isnan(coords).any():
        raise DimacsError(f"{path}: coordinates missing for some nodes")
    return coords


def parse_dimacs(gr_path, co_path=None) -> WeightedGraph:
    """Undirected graph from a ``.gr`` file; arcs ``u->v`` and ``v->u`` merge to the cheaper."""
    n, _, t, h, c = read_gr(gr_path)
    loops = t != h
    coords = read_co(co_path, n) if co_path is not None else None
    return WeightedGraph.from_arrays(n, t[loops], h[loops], c[loops], coords=coords)


def sample_rectangle_subgraph(
    g: WeightedGraph, width_frac: float, height_frac: float, seed=None
) -> tuple[WeightedGraph, np.ndarray]:
    """Largest connected piece of the nodes inside a randomly placed rectangle.

    Returns the compacted subgraph and the original ids of its nodes.
    """
    if g.coords is None:
        raise GraphError("graph has no coordinates")
    rng = np.random.default_rng(seed)
    lo = g.coords.min(axis=0)
    span = g.coords.max(axis=0) - lo
    size = span * np.array([width_frac, height_frac])
    corner = lo + rng.random(2) * np.maximum(span - size, 0.0)
    inside = np.all((g.coords >= corner) & (g.coords <= corner + size), axis=1)
    nodes = np.flatnonzero(inside)
    if nodes.size == 0:
        raise GraphError("rectangle contains no nodes")
    sub, keep = g.subgraph(nodes)
    labels = sub.components()
    counts = np.bincount(labels)
    # largest component; ties go to the one holding the smallest node id
    best = int(np.flatnonzero(counts == counts.max())[0])
    piece = np.flatnonzero(labels == best)
    final, idx = sub.subgraph(piece)
    return final, keep[idx]
