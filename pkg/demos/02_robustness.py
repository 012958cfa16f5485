# %% [markdown]
# # Robustness to prediction accuracy
#
# Random graphs with 5000 cheap edges (every other pair costs 100000), k = 50
# uniform terminals in random order. The prediction keeps `floor(k * acc)`
# true terminals and fills the rest with random non-terminals.

# %%
import numpy as np

from onlinesteiner.experiment import ExperimentConfig, run_experiment

cfg = ExperimentConfig(
    "robustness-sweep",
    "random:n=500,m=5000,seed=0",
    k=50,
    grid=(0.0, 0.2, 0.4, 0.6, 0.8, 1.0),
    trials=5,
    seed=0,
)
res = run_experiment(cfg, "robustness.csv")
print(len(res.records), "rows written to robustness.csv")

# %%
for (label, algo), mean in res.summary().items():
    print(f"{label:30s} {algo:11s} {mean:.3f}")

# %% [markdown]
# Spread across trials at full accuracy:

# %%
for algo in cfg.algorithms:
    r = [x.ratio_baseline for x in res.records
         if x.algorithm == algo and x.experiment.endswith("lambda=1.0")]
    print(algo, np.round(r, 3))

# %% [markdown]
# The same sweep is available from the shell:
#
# ```
# online-steiner sweep --graph random:n=500,m=5000 --k 50 --trials 10 --out sweep.csv
# ```
