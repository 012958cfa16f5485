"""``online-steiner`` command line."""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .directed import run_directed
from .experiment import LAMBDA_GRID, TRAIN_GRID, ExperimentConfig, run_experiment
from .generators import random_order, uniform_terminals
from .graph import GraphError
from .io import instance_to_json, load_graph
from .online import ALGORITHMS
from .oracle import exact_mdst, exact_steiner
from .plan import OnlineInstance, verify_plan
from .predictions import THETA_GRID, mix_prediction, prediction_error

ALGO_CHOICES = ("greedy", "oapt", "ioapt", "ioapt-lazy", "directed")


def _floats(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _algos(text: str) -> tuple[str, ...]:
    names = tuple(x.strip() for x in text.split(",") if x.strip())
    bad = [a for a in names if a not in ALGO_CHOICES]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"choose from {','.join(ALGO_CHOICES)}")
    return names


def _common(p: argparse.ArgumentParser, graph_required: bool = True) -> None:
    p.add_argument("--graph", required=graph_required, help="instance JSON, DIMACS .gr, or generator spec")
    p.add_argument("--seed", type=int, default=0)


def _experiment_flags(p: argparse.ArgumentParser, k: int) -> None:
    p.add_argument("--k", type=int, default=k)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--algo", type=_algos, default=("oapt", "ioapt", "ioapt-lazy"),
                   help="comma-separated list of algorithms")
    p.add_argument("--distribution", choices=("uniform", "two-class", "clustered"), default="uniform")
    p.add_argument("--vh-size", type=int, default=40)
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--x", type=int, default=10)
    p.add_argument("--out", help="CSV output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="online-steiner", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a graph or instance as JSON")
    _common(p)
    p.add_argument("--k", type=int, default=0, help="draw k uniform terminals in random order")
    p.add_argument("--accuracy", type=float, help="also draw a prediction with this accuracy")
    p.add_argument("--out", required=True)

    p = sub.add_parser("run", help="run one algorithm on one instance")
    _common(p)
    p.add_argument("--algo", choices=ALGO_CHOICES, default="ioapt")
    p.add_argument("--k", type=int, help="draw k terminals when the instance has none")
    p.add_argument("--accuracy", type=float, help="draw a prediction when the instance has none")
    p.add_argument("--verbose", action="store_true", help="print every arrival")

    p = sub.add_parser("sweep", help="robustness sweep over prediction accuracy")
    _common(p)
    _experiment_flags(p, 50)
    p.add_argument("--lambda-grid", type=_floats, default=LAMBDA_GRID)

    p = sub.add_parser("learn", help="learnability over training-set counts")
    _common(p)
    _experiment_flags(p, 20)
    p.add_argument("--train-grid", type=_floats, default=TRAIN_GRID)
    p.add_argument("--theta-grid", type=_floats, default=THETA_GRID)
    p.add_argument("--learn-algo", choices=tuple(ALGORITHMS), default="ioapt")

    p = sub.add_parser("hard", help="the instance where OAPT pays (k-2) times the optimum")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--out")

    p = sub.add_parser("directed-check", help="verify the directed MDST bound on random digraphs")
    _common(p, graph_required=False)
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--lambda-grid", type=_floats, default=(0.0, 0.5, 1.0))
    p.add_argument("--out")

    p = sub.add_parser("oracle", help="exact optimum for an instance's terminals")
    _common(p)
    return parser


def _instance(args):
    graph_id, loaded = load_graph(args.graph, seed=args.seed)
    g = loaded.graph
    arrivals, pred = loaded.arrivals, loaded.prediction
    rng = np.random.default_rng(args.seed)
    k = getattr(args, "k", None)
    if not arrivals and k:
        pool = [v for v in range(g.n) if v != g.root] if g.directed else range(g.n)
        terms = sorted(rng.choice(np.asarray(list(pool)), size=k, replace=False).tolist())
        arrivals = random_order(terms, rng)
    accuracy = getattr(args, "accuracy", None)
    if accuracy is not None and not pred.nodes and arrivals:
        universe = [v for v in range(g.n) if v != g.root]
        pred = mix_prediction(arrivals, universe, accuracy, rng)
    return graph_id, g, arrivals, pred


def cmd_gen(args) -> int:
    _, g, arrivals, pred = _instance(args)
    with open(args.out, "w") as fh:
        json.dump(instance_to_json(g, arrivals, pred), fh)
        fh.write("\n")
    print(f"wrote {args.out}: {g.n} nodes, {g.m} edges, {len(arrivals)} arrivals, {len(pred)} predicted")
    return 0


def cmd_run(args) -> int:
    graph_id, g, arrivals, pred = _instance(args)
    if not arrivals:
        raise GraphError("instance has no arrivals; pass --k")
    inst = OnlineInstance(g, arrivals)
    if args.algo == "directed":
        plan = run_directed(inst, pred)
    else:
        plan = ALGORITHMS[args.algo](inst, pred)
    verify_plan(plan, inst)
    print(f"graph {graph_id}: n={g.n} m={g.m} k={inst.k} eta={prediction_error(arrivals, pred)}")
    print(f"{args.algo} cost {plan.total!r}  (A1 {plan.a1_cost!r}, A2 {plan.a2_cost!r})")
    print(f"edges bought {len(plan.bought)}, reserved unpaid {len(plan.reserved)}")
    if args.verbose:
        for step in plan.steps:
            print(f"  t={step.terminal} case={step.case} paid={step.paid!r} edges={len(step.bought)}")
    return 0


def _print_summary(result) -> None:
    for (label, algo), mean in result.summary().items():
        print(f"{label:32s} {algo:16s} mean ratio to greedy {mean:.4f}")


def cmd_sweep(args) -> int:
    cfg = ExperimentConfig(
        "robustness-sweep", args.graph, args.k, args.lambda_grid, args.distribution, args.vh_size,
        args.sigma, args.x, args.trials, args.seed, args.algo,
    )
    _print_summary(run_experiment(cfg, args.out))
    return 0


def cmd_learn(args) -> int:
    cfg = ExperimentConfig(
        "learnability", args.graph, args.k, args.train_grid, args.distribution, args.vh_size,
        args.sigma, args.x, args.trials, args.seed, args.algo, args.theta_grid, args.learn_algo,
    )
    _print_summary(run_experiment(cfg, args.out))
    return 0


def cmd_hard(args) -> int:
    t0 = time.perf_counter()
    cfg = ExperimentConfig("hard-instance", k=args.k, trials=1, algorithms=("greedy", "oapt", "ioapt", "ioapt-lazy"))
    result = run_experiment(cfg, args.out)
    opt = result.records[0].oracle_bound
    print(f"hard instance k={args.k}: n={2 * args.k - 2} eta={result.records[0].eta}")
    print(f"oracle OPT {opt:.6f}")
    for r in result.records:
        print(f"{r.algorithm:12s} cost {r.cost:.6f}  ratio to OPT {r.ratio_oracle:.6f}")
    print(f"elapsed {time.perf_counter() - t0:.3f}s")
    return 0


def cmd_directed_check(args) -> int:
    cfg = ExperimentConfig(
        "directed-check", args.graph, args.k, args.lambda_grid, trials=args.trials, seed=args.seed,
        algorithms=("directed",),
    )
    result = run_experiment(cfg, args.out)
    bad = [c for c in result.bound_checks if not c.ok]
    print(f"{len(result.bound_checks)} epoch checks, {len(bad)} violations")
    for c in bad:
        print(f"  trial {c.trial} lambda {c.lam}: MDST {c.mdst} > OPT {c.opt} + {c.lam}*{c.eta}")
    return 1 if bad else 0


def cmd_oracle(args) -> int:
    graph_id, loaded = load_graph(args.graph, seed=args.seed)
    g = loaded.graph
    terms = sorted(set(loaded.arrivals))
    if not terms:
        raise GraphError("instance has no terminals")
    res = exact_mdst(g, terms) if g.directed else exact_steiner(g, terms)
    print(f"graph {graph_id}: {len(terms)} terminals, OPT {res.cost!r}, {len(res.tree)} edges")
    return 0


COMMANDS = {
    "gen": cmd_gen, "run": cmd_run, "sweep": cmd_sweep, "learn": cmd_learn,
    "hard": cmd_hard, "directed-check": cmd_directed_check, "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (GraphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
