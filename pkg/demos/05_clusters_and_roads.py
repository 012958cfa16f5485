# %% [markdown]
# # Clustered terminals on a road-like graph
#
# Road networks come as DIMACS `.gr`/`.co` files. Here a jittered grid
# stands in for one; a real file goes through the same path via
# `parse_dimacs` and `sample_rectangle_subgraph`.

# %%
import tempfile
from pathlib import Path

import numpy as np

from onlinesteiner.dimacs import parse_dimacs, sample_rectangle_subgraph
from onlinesteiner.generators import gen_grid_graph
from onlinesteiner.graph import graph_radius
from onlinesteiner.predictions import greedy_cluster, sample_clustered_terminals

grid = gen_grid_graph(60, 60, drop=0.15, seed=0)
print(grid.n, "nodes,", grid.m, "edges")

# %% [markdown]
# Write it as DIMACS and read it back, then cut out a random rectangle.

# %%
tmp = Path(tempfile.mkdtemp())
with open(tmp / "grid.gr", "w") as fh:
    fh.write(f"p sp {grid.n} {2 * grid.m}\n")
    for a, b, w in grid.edges():
        fh.write(f"a {a + 1} {b + 1} {int(w)}\na {b + 1} {a + 1} {int(w)}\n")
with open(tmp / "grid.co", "w") as fh:
    for i, (x, y) in enumerate(grid.coords, 1):
        fh.write(f"v {i} {float(x)!r} {float(y)!r}\n")

road = parse_dimacs(tmp / "grid.gr", tmp / "grid.co")
sub, ids = sample_rectangle_subgraph(road, 0.6, 0.6, seed=1)
print("rectangle piece:", sub.n, "nodes")

# %%
r = graph_radius(sub)
for sigma in (0.05, 0.1, 0.2, 0.4):
    cl = greedy_cluster(sub, sigma, radius=r)
    sizes = sorted((len(m) for _, m in cl.clusters), reverse=True)
    print(f"sigma={sigma}: {len(cl.clusters)} clusters, largest {sizes[:5]}")

# %%
cl = greedy_cluster(sub, 0.1, radius=r)
terms = sample_clustered_terminals(cl, x=10, budget=50, seed=3)
labels = cl.labels(sub.n)
print(len(terms), "terminals from clusters", sorted(set(labels[terms].tolist())))

# %% [markdown]
# From the shell, `--graph road:gr=FILE,co=FILE,w=0.1,h=0.1` samples a
# rectangle of a real road file before running a sweep.
