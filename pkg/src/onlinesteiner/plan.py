"""Instances, predictions and the purchase ledger shared by all online algorithms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .graph import Edge, GraphError, UnionFind, WeightedGraph, edge_key

# ledger partitions: A1 holds greedy-style purchases, A2 prediction-driven ones
A1 = 1
A2 = 2


class InfeasiblePlanError(AssertionError):
    """A plan broke connectivity or single-payment accounting."""


@dataclass(frozen=True)
class OnlineInstance:
    graph: WeightedGraph
    arrivals: tuple[int, ...]

    def __post_init__(self):
        arr = tuple(int(self.graph.check_node(t)) for t in self.arrivals)
        object.__setattr__(self, "arrivals", arr)
        if not arr:
            raise GraphError("instance needs at least one terminal")
        if len(set(arr)) != len(arr):
            raise GraphError("arrivals must be distinct")

    @property
    def k(self) -> int:
        return len(self.arrivals)

    @property
    def terminals(self) -> frozenset[int]:
        return frozenset(self.arrivals)


@dataclass(frozen=True)
class PredictionSet:
    nodes: frozenset[int] = frozenset()

    @classmethod
    def of(cls, nodes: Iterable[int] = ()) -> "PredictionSet":
        return cls(frozenset(int(x) for x in nodes))

    def validate(self, g: WeightedGraph) -> "PredictionSet":
        for x in self.nodes:
            g.check_node(x)
        return self

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, x) -> bool:
        return x in self.nodes

    def sorted(self) -> list[int]:
        return sorted(self.nodes)


@dataclass
class ArrivalStep:
    terminal: int
    case: int
    paid: float = 0.0
    bought: list[Edge] = field(default_factory=list)
    reserved: list[Edge] = field(default_factory=list)


@dataclass
class PurchasePlan:
    """Bought (and, in lazy mode, reserved) original edges with an A1/A2 ledger."""

    directed: bool = False
    bought: dict[tuple[int, int], float] = field(default_factory=dict)
    reserved: dict[tuple[int, int], float] = field(default_factory=dict)
    a1_cost: float = 0.0
    a2_cost: float = 0.0
    steps: list[ArrivalStep] = field(default_factory=list)
    components: UnionFind = field(default_factory=UnionFind, repr=False)

    @property
    def total(self) -> float:
        return self.a1_cost + self.a2_cost

    @property
    def deltas(self) -> list[float]:
        return [s.paid for s in self.steps]

    def start(self, terminal: int, case: int) -> ArrivalStep:
        step = ArrivalStep(terminal, case)
        self.steps.append(step)
        self.components.find(terminal)
        return step

    def buy(self, edges: Iterable[Edge], part: int) -> float:
        """Pay for every edge not yet bought; returns the amount paid."""
        step = self.steps[-1]
        paid = 0.0
        for a, b, w in edges:
            key = edge_key(a, b, self.directed)
            if key in self.bought:
                continue
            self.reserved.pop(key, None)
            self.bought[key] = w
            step.bought.append((key[0], key[1], w))
            paid += w
            if not self.directed:
                self.components.union(a, b)
        if part == A1:
            self.a1_cost += paid
        else:
            self.a2_cost += paid
        step.paid += paid
        return paid

    def reserve(self, edges: Iterable[Edge]) -> None:
        step = self.steps[-1]
        for a, b, w in edges:
            key = edge_key(a, b, self.directed)
            if key not in self.bought and key not in self.reserved:
                self.reserved[key] = w
                step.reserved.append((key[0], key[1], w))

    def connected(self, a: int, b: int) -> bool:
        return self.components.find(a) == self.components.find(b)

    def edge_list(self) -> list[Edge]:
        return [(a, b, w) for (a, b), w in sorted(self.bought.items())]


def verify_plan(plan: PurchasePlan, inst: OnlineInstance, tol: float = 1e-9) -> None:
    """Replay ``plan`` step by step and check feasibility and single payment.

    Undirected: after arrival ``i`` all of ``t_1..t_i`` share a component of the
    bought subgraph. Directed: every arrived terminal reaches the root.
    """
    g = inst.graph
    if len(plan.steps) != inst.k:
        raise InfeasiblePlanError("one ledger step per arrival expected")
    seen: set[tuple[int, int]] = set()
    paid_total = 0.0
    uf = UnionFind()
    into: dict[int, list[int]] = {}
    for i, (step, t) in enumerate(zip(plan.steps, inst.arrivals)):
        if step.terminal != t:
            raise InfeasiblePlanError(f"step {i} records terminal {step.terminal}, expected {t}")
        step_sum = 0.0
        for a, b, w in step.bought:
            key = edge_key(a, b, plan.directed)
            if key in seen:
                raise InfeasiblePlanError(f"edge {key} paid twice")
            seen.add(key)
            if abs(g.edge_cost(a, b) - w) > tol:
                raise InfeasiblePlanError(f"edge {key} paid {w}, costs {g.edge_cost(a, b)}")
            step_sum += w
            if plan.directed:
                into.setdefault(b, []).append(a)
            else:
                uf.union(a, b)
        if abs(step_sum - step.paid) > tol * max(1.0, step_sum):
            raise InfeasiblePlanError(f"step {i} ledger mismatch")
        paid_total += step_sum
        if plan.directed:
            reach = _reaching(into, g.root)
            missing = [x for x in inst.arrivals[: i + 1] if x not in reach]
            if missing:
                raise InfeasiblePlanError(f"after arrival {i}: {missing} cannot reach root")
        else:
            root = uf.find(inst.arrivals[0])
            for x in inst.arrivals[: i + 1]:
                if uf.find(x) != root:
                    raise InfeasiblePlanError(f"after arrival {i}: terminal {x} disconnected")
    if seen != set(plan.bought):
        raise InfeasiblePlanError("ledger steps disagree with bought set")
    if abs(paid_total - plan.total) > tol * max(1.0, paid_total):
        raise InfeasiblePlanError("A1 + A2 differs from the sum over bought edges")
    if abs(sum(plan.bought.values()) - plan.total) > tol * max(1.0, paid_total):
        raise InfeasiblePlanError("bought edge costs differ from ledger total")


def _reaching(into: dict[int, list[int]], root: int) -> set[int]:
    out = {root}
    stack = [root]
    while stack:
        x = stack.pop()
        for y in into.get(x, ()):
            if y not in out:
                out.add(y)
                stack.append(y)
    return out

