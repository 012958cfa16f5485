# %% [markdown]
# # When a wrong prediction hurts OAPT
#
# A small cycle graph where most predicted terminals never show up. OAPT
# follows the predicted tree around the cycle; greedy takes the cheap spokes.

# %%
from onlinesteiner.generators import gen_hard_instance
from onlinesteiner.graph import metric_closure, mst
from onlinesteiner.online import run_greedy, run_ioapt, run_oapt
from onlinesteiner.oracle import exact_steiner
from onlinesteiner.predictions import prediction_error

k = 10
g, inst, pred = gen_hard_instance(k)
print(g.n, "nodes,", g.m, "edges")
print("arrivals:", inst.arrivals)
print("prediction:", pred.sorted())
print("eta':", prediction_error(inst.terminals, pred))

# %% [markdown]
# The predicted tree is the nine unit edges of the cycle. Its weight alone is
# much larger than the real optimum.

# %%
tree = mst(metric_closure(g, pred.nodes))
opt = exact_steiner(g, inst.arrivals)
print("MST(prediction) =", tree.total)
print("OPT =", opt.cost)

# %%
for name, plan in [
    ("greedy", run_greedy(inst)),
    ("oapt", run_oapt(inst, pred)),
    ("ioapt", run_ioapt(inst, pred)),
    ("ioapt-lazy", run_ioapt(inst, pred, lazy=True)),
]:
    print(f"{name:11s} {plan.total:9.6f}  ratio {plan.total / opt.cost:.4f}")

# %% [markdown]
# The ratio for OAPT is exactly `k - 2`, the prediction error. IOAPT caps
# each predicted step near the cost of the direct edge, and the lazy variant
# never pays for the tree edges it only reserved.

# %%
lazy = run_ioapt(inst, pred, lazy=True)
print("reserved but unpaid:", sorted(lazy.reserved))
for step in run_ioapt(inst, pred).steps:
    print(step.terminal, step.case, step.paid)

# %% [markdown]
# The ratio grows linearly with k.

# %%
for k in (6, 10, 18, 34, 66):
    g, inst, pred = gen_hard_instance(k)
    opt = exact_steiner(g, inst.arrivals).cost if k <= 14 else 1 + (k - 1) / (k - 2) ** 2
    print(k, round(run_oapt(inst, pred).total / opt, 6))
