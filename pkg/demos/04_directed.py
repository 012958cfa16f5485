# %% [markdown]
# # Directed instances and the doubling guess
#
# Every terminal must reach the root. The algorithm keeps a power-of-two
# guess `lam` of the costliest connection so far and only trusts predicted
# terminals whose own connection fits inside it.

# %%
import numpy as np

from onlinesteiner.directed import root_costs, run_directed, t_hat_lambda
from onlinesteiner.generators import gen_random_digraph, random_order
from onlinesteiner.oracle import exact_mdst
from onlinesteiner.plan import OnlineInstance, verify_plan
from onlinesteiner.predictions import mix_prediction, prediction_error

rng = np.random.default_rng(4)
g = gen_random_digraph(18, 36, seed=4)
terms = sorted(rng.choice(np.arange(1, g.n), size=6, replace=False).tolist())
inst = OnlineInstance(g, random_order(terms, rng))
pred = mix_prediction(terms, np.arange(1, g.n), 0.5, rng)
print("arrivals", inst.arrivals)
print("prediction", pred.sorted(), "eta'", prediction_error(terms, pred))
print("cost to root", {t: root_costs(g)[t] for t in inst.arrivals})

# %%
plan = run_directed(inst, pred)
verify_plan(plan, inst)
opt = exact_mdst(g, terms).cost
print("cost", plan.total, "OPT", opt)
print("lam history", plan.state.lam_history)
for ep in plan.state.epochs:
    print(f"lam={ep.lam:5.0f}  T_hat(lam)={sorted(ep.members)}  MDST={ep.mdst.cost}")

# %% [markdown]
# The filtered tree never costs more than `OPT + lam * eta'`:

# %%
eta = prediction_error(terms, pred)
lam = 1.0
while lam <= plan.state.lam:
    members = t_hat_lambda(pred, g, lam)
    print(lam, exact_mdst(g, members).cost, "<=", opt + lam * eta)
    lam *= 2

# %% [markdown]
# `online-steiner directed-check --trials 10` repeats this on random digraphs
# and prints the number of violations.
