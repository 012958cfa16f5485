"""Seeded experiment harness: robustness sweeps, learnability, the hard instance, directed checks."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .directed import run_directed, t_hat_lambda
from .generators import gen_hard_instance, gen_random_digraph, gen_two_class, pick_hot_set, random_order, uniform_terminals
from .graph import GraphError, MetricView, WeightedGraph
from .io import LoadedInstance, load_graph
from .online import ALGORITHMS, run_greedy
from .oracle import MAX_UNDIRECTED_TERMINALS, exact_mdst, exact_steiner, opt_lower_bound
from .plan import OnlineInstance, PredictionSet, PurchasePlan, verify_plan
from .predictions import THETA_GRID, greedy_cluster, learn_terminals, mix_prediction, prediction_error, sample_clustered_terminals

KINDS = ("robustness-sweep", "learnability", "hard-instance", "directed-check")
DISTRIBUTIONS = ("uniform", "two-class", "clustered")
CSV_HEADER = (
    "experiment,graph_id,seed,algorithm,k,eta,cost,baseline_cost,"
    "oracle_bound,ratio_baseline,ratio_oracle"
)
LAMBDA_GRID = tuple(round(0.1 * i, 1) for i in range(11))
TRAIN_GRID = (1, 5, 10, 50)

# stream tags mixed into SeedSequence entropy so per-graph draws never collide with trial draws
_HOT_TAG = 0x4854
_GRAPH_TAG = 0x4752


@dataclass
class ExperimentConfig:
    kind: str
    graph: str | None = None
    k: int = 50
    grid: tuple[float, ...] = LAMBDA_GRID
    distribution: str = "uniform"
    vh_size: int = 40
    sigma: float = 0.1
    x: int = 10
    trials: int = 10
    seed: int = 0
    algorithms: tuple[str, ...] = ("oapt", "ioapt", "ioapt-lazy")
    thetas: tuple[float, ...] = THETA_GRID
    learn_algo: str = "ioapt"
    accuracy: float = 0.5  # prediction accuracy for directed-check when no grid is given

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"distribution must be one of {DISTRIBUTIONS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.grid:
            raise ValueError("grid must be nonempty")
        if not self.thetas:
            raise ValueError("theta grid must be nonempty")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        valid = set(ALGORITHMS) | {"directed"}
        bad = [a for a in self.algorithms if a not in valid]
        if bad:
            raise ValueError(f"unknown algorithms {bad}")
        if self.learn_algo not in ALGORITHMS:
            raise ValueError(f"unknown learning algorithm {self.learn_algo!r}")


@dataclass
class TrialRecord:
    experiment: str
    graph_id: str
    seed: int
    algorithm: str
    k: int
    eta: int
    cost: float
    baseline_cost: float
    oracle_bound: float
    oracle_kind: str = "exact"
    notes: dict = field(default_factory=dict)

    @property
    def ratio_baseline(self) -> float:
        return _ratio(self.cost, self.baseline_cost)

    @property
    def ratio_oracle(self) -> float:
        return _ratio(self.cost, self.oracle_bound)

    def row(self) -> list[str]:
        return [
            self.experiment, self.graph_id, str(self.seed), self.algorithm, str(self.k), str(self.eta),
            repr(float(self.cost)), repr(float(self.baseline_cost)), repr(float(self.oracle_bound)),
            repr(self.ratio_baseline), repr(self.ratio_oracle),
        ]


@dataclass
class BoundCheck:
    trial: int
    lam: float
    members: int
    mdst: float
    opt: float
    eta: int

    @property
    def ok(self) -> bool:
        return self.mdst <= self.opt + self.lam * self.eta + 1e-9


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[TrialRecord]
    bound_checks: list[BoundCheck] = field(default_factory=list)

    def mean_ratio(self, algorithm: str, experiment: str | None = None) -> float:
        vals = [
            r.ratio_baseline for r in self.records
            if r.algorithm == algorithm and (experiment is None or r.experiment == experiment)
        ]
        if not vals:
            raise KeyError(f"no records for {algorithm!r} in {experiment!r}")
        return float(np.mean(vals))

    def summary(self) -> dict[tuple[str, str], float]:
        """Mean ratio-to-baseline per (experiment label, algorithm)."""
        keys = sorted({(r.experiment, r.algorithm) for r in self.records}, key=_label_order)
        return {key: self.mean_ratio(key[1], key[0]) for key in keys}


def _ratio(a: float, b: float) -> float:
    if b == 0:
        return 1.0 if a == 0 else math.inf
    return a / b


def _label_order(key):
    label, algo = key
    head, _, value = label.partition(":")
    try:
        num = float(value.split("=", 1)[1])
    except (IndexError, ValueError):
        num = 0.0
    return head, num, algo


def trial_seed(base: int, grid_idx: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([base, grid_idx, trial])


def _grid_label(kind: str, value) -> str:
    if kind == "robustness-sweep":
        return f"{kind}:lambda={value!r}"
    if kind == "learnability":
        return f"{kind}:s={int(value)}"
    if kind == "directed-check":
        return f"{kind}:lambda={value!r}"
    return kind


def write_csv(records: Sequence[TrialRecord], path, failure: str | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        w = csv.writer(fh, lineterminator="\n")
        for r in records:
            w.writerow(r.row())
        if failure is not None:
            w.writerow(["FAILED", failure, "", "", "", "", "", "", "", "", ""])


class _TerminalSource:
    """Draws terminal sets from the configured distribution on a fixed graph."""

    def __init__(self, cfg: ExperimentConfig, g: WeightedGraph, view: MetricView):
        self.cfg = cfg
        self.g = g
        self.hot = None
        self.clusters = None
        if cfg.distribution == "two-class":
            self.hot = pick_hot_set(g.n, cfg.vh_size, np.random.default_rng([cfg.seed, _HOT_TAG]))
        elif cfg.distribution == "clustered":
            self.clusters = greedy_cluster(g, cfg.sigma, view)

    def draw(self, rng: np.random.Generator) -> list[int]:
        if self.hot is not None:
            return gen_two_class(self.g.n, self.hot, self.cfg.k, rng)
        if self.clusters is not None:
            return sample_clustered_terminals(self.clusters, self.cfg.x, self.cfg.k, rng)
        return uniform_terminals(self.g.n, self.cfg.k, rng)


def _oracle(g: WeightedGraph, terms, view: MetricView) -> tuple[float, str]:
    if len(terms) <= MAX_UNDIRECTED_TERMINALS:
        return exact_steiner(g, terms, view).cost, "exact"
    return opt_lower_bound(g, terms, view), "mst-half"


def _run_checked(name: str, inst: OnlineInstance, pred: PredictionSet, view: MetricView) -> PurchasePlan:
    plan = ALGORITHMS[name](inst, pred, view)
    verify_plan(plan, inst)
    return plan


def _score(
    label: str, graph_id: str, seed: int, inst: OnlineInstance, pred: PredictionSet,
    algorithms: Sequence[str], view: MetricView, notes: dict | None = None,
) -> list[TrialRecord]:
    baseline = run_greedy(inst, view)
    verify_plan(baseline, inst)
    bound, kind = _oracle(inst.graph, inst.arrivals, view)
    eta = prediction_error(inst.terminals, pred)
    out = []
    for name in algorithms:
        plan = baseline if name == "greedy" else _run_checked(name, inst, pred, view)
        out.append(TrialRecord(
            label, graph_id, seed, name, inst.k, eta, plan.total, baseline.total, bound, kind,
            dict(notes or {}),
        ))
    return out


def _int_seed(seq: np.random.SeedSequence) -> int:
    return int(seq.generate_state(1, dtype=np.uint32)[0])


def _robustness(cfg: ExperimentConfig, graph_id: str, loaded: LoadedInstance, records: list) -> None:
    g = loaded.graph
    view = MetricView(g)
    source = _TerminalSource(cfg, g, view)
    universe = np.arange(g.n)
    for gi, acc in enumerate(cfg.grid):
        label = _grid_label(cfg.kind, acc)
        for trial in range(cfg.trials):
            seq = trial_seed(cfg.seed, gi, trial)
            s_terms, s_order, s_pred = seq.spawn(3)
            terms = source.draw(np.random.default_rng(s_terms))
            inst = OnlineInstance(g, random_order(terms, np.random.default_rng(s_order)))
            pred = mix_prediction(terms, universe, float(acc), s_pred)
            records.extend(_score(label, graph_id, _int_seed(seq), inst, pred, cfg.algorithms, view))


def _learnability(cfg: ExperimentConfig, graph_id: str, loaded: LoadedInstance, records: list) -> None:
    g = loaded.graph
    view = MetricView(g)
    source = _TerminalSource(cfg, g, view)
    learner = ALGORITHMS[cfg.learn_algo]
    for gi, s in enumerate(cfg.grid):
        s = int(s)
        if s < 1:
            raise ValueError("training counts must be >= 1")
        label = _grid_label(cfg.kind, s)
        for trial in range(cfg.trials):
            seq = trial_seed(cfg.seed, gi, trial)
            s_train, s_learn, s_test, s_order = seq.spawn(4)
            train_rng = np.random.default_rng(s_train)
            samples = [source.draw(train_rng) for _ in range(s)]
            learned = learn_terminals(
                samples, g, lambda inst, pred: learner(inst, pred, view), seed=s_learn, thetas=cfg.thetas
            )
            terms = source.draw(np.random.default_rng(s_test))
            inst = OnlineInstance(g, random_order(terms, np.random.default_rng(s_order)))
            notes = {"theta": learned.theta, "predicted": len(learned.prediction)}
            records.extend(
                _score(label, graph_id, _int_seed(seq), inst, learned.prediction, cfg.algorithms, view, notes)
            )


def _hard(cfg: ExperimentConfig, records: list) -> None:
    g, inst, pred = gen_hard_instance(cfg.k)
    view = MetricView(g)
    algos = cfg.algorithms or tuple(ALGORITHMS)
    records.extend(_score(cfg.kind, f"hard:k={cfg.k}", cfg.seed, inst, pred, algos, view))


def _directed_graph(cfg: ExperimentConfig, k: int, rng: np.random.Generator) -> WeightedGraph:
    # enough non-root nodes for k terminals plus k wrong predictions
    n = int(rng.integers(max(8, 2 * k + 1), max(20, 2 * k + 1) + 1))
    return gen_random_digraph(n, 2 * n, seed=rng)


def _directed(cfg: ExperimentConfig, loaded: LoadedInstance | None, records: list, checks: list) -> None:
    k = min(cfg.k, 8)
    trial_id = 0
    for gi, acc in enumerate(cfg.grid):
        label = _grid_label(cfg.kind, acc)
        for trial in range(cfg.trials):
            seq = trial_seed(cfg.seed, gi, trial)
            s_graph, s_terms, s_order, s_pred = seq.spawn(4)
            if loaded is None:
                g = _directed_graph(cfg, k, np.random.default_rng(s_graph))
                graph_id = f"digraph:n={g.n},seed={_int_seed(s_graph)}"
            else:
                g = loaded.graph
                graph_id = cfg.graph
            universe = np.array([v for v in range(g.n) if v != g.root])
            terms = sorted(np.random.default_rng(s_terms).choice(universe, size=k, replace=False).tolist())
            inst = OnlineInstance(g, random_order(terms, np.random.default_rng(s_order)))
            pred = mix_prediction(terms, universe, float(acc), s_pred)
            view, rview = MetricView(g), MetricView(g, reverse=True)
            plan = run_directed(inst, pred, view=view, rview=rview)
            verify_plan(plan, inst)
            base = run_directed(inst, PredictionSet(), view=view, rview=rview)
            verify_plan(base, inst)
            opt = exact_mdst(g, terms, view).cost
            eta = prediction_error(terms, pred)
            to_root = rview.distances(g.root)
            lam = 1.0
            while lam <= plan.state.lam:
                members = t_hat_lambda(pred, g, lam, to_root)
                checks.append(BoundCheck(trial_id, lam, len(members), exact_mdst(g, members, view).cost, opt, eta))
                lam *= 2
            notes = {"lambda_final": plan.state.lam, "epochs": len(plan.state.epochs)}
            seed = _int_seed(seq)
            for name, p in (("directed", plan), ("directed-greedy", base)):
                records.append(TrialRecord(label, graph_id, seed, name, k, eta, p.total, base.total, opt, "exact", dict(notes)))
            trial_id += 1


def run_experiment(cfg: ExperimentConfig, out=None) -> ExperimentResult:
    """Run every grid point and trial; write the CSV to ``out`` when given.

    On an error the rows gathered so far are written with a trailing FAILED
    marker row and the error is re-raised.
    """
    records: list[TrialRecord] = []
    checks: list[BoundCheck] = []
    try:
        if cfg.kind == "hard-instance":
            _hard(cfg, records)
        elif cfg.kind == "directed-check":
            loaded = None
            if cfg.graph is not None:
                _, loaded = load_graph(cfg.graph, seed=cfg.seed)
                if not loaded.graph.directed:
                    raise GraphError("directed-check needs a directed graph")
            _directed(cfg, loaded, records, checks)
        else:
            if cfg.graph is None:
                raise ValueError(f"{cfg.kind} needs a graph")
            graph_id, loaded = load_graph(cfg.graph, seed=cfg.seed)
            if cfg.kind == "robustness-sweep":
                _robustness(cfg, graph_id, loaded, records)
            else:
                _learnability(cfg, graph_id, loaded, records)
    except Exception as exc:
        if out is not None:
            write_csv(records, out, failure=f"{type(exc).__name__}: {exc}")
        raise
    if out is not None:
        write_csv(records, out)
    return ExperimentResult(cfg, records, checks)
