"""Instance JSON files and graph spec strings."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .dimacs import parse_dimacs, sample_rectangle_subgraph
from .generators import gen_grid_graph, gen_hard_instance, gen_random_digraph, gen_random_graph
from .graph import GraphError, WeightedGraph
from .plan import OnlineInstance, PredictionSet


@dataclass
class LoadedInstance:
    graph: WeightedGraph
    arrivals: tuple[int, ...] = ()
    prediction: PredictionSet = PredictionSet()

    @property
    def instance(self) -> OnlineInstance:
        return OnlineInstance(self.graph, self.arrivals)


def instance_to_json(g: WeightedGraph, arrivals=(), prediction=None) -> dict:
    out = {
        "nodes": g.n,
        "edges": [[a, b, w] for a, b, w in g.edges()],
        "arrivals": [int(x) for x in arrivals],
        "prediction": sorted(int(x) for x in (prediction.nodes if prediction else ())),
    }
    if g.directed:
        out["root"] = g.root
    return out


def save_instance(path, g: WeightedGraph, arrivals=(), prediction=None) -> None:
    Path(path).write_text(json.dumps(instance_to_json(g, arrivals, prediction)) + "\n")


def instance_from_json(obj: dict) -> LoadedInstance:
    try:
        root = obj.get("root")
        g = WeightedGraph.from_edges(
            int(obj["nodes"]), obj["edges"], directed=root is not None, root=root
        )
        return LoadedInstance(
            g, tuple(int(x) for x in obj.get("arrivals", [])), PredictionSet.of(obj.get("prediction", []))
        )
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed instance JSON: {exc}") from exc


def load_instance(path) -> LoadedInstance:
    return instance_from_json(json.loads(Path(path).read_text()))


def _params(text: str) -> dict[str, str]:
    out = {}
    for part in filter(None, text.split(",")):
        if "=" not in part:
            raise GraphError(f"expected key=value in graph spec, got {part!r}")
        key, value = part.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def load_graph(spec: str, seed: int = 0) -> tuple[str, LoadedInstance]:
    """Resolve ``spec`` into ``(graph_id, loaded)``.

    Forms: ``random:n=500,m=5000[,lo=1,hi=1000,filler=100000,seed=0]``,
    ``grid:rows=40,cols=50[,drop=0.1,seed=0]``, ``hard:k=10``,
    ``digraph:n=20,extra=40[,seed=0]``,
    ``road:gr=FILE[,co=FILE,w=0.1,h=0.1,seed=0]``, or a path to an instance
    ``.json`` or a DIMACS ``.gr``/``.gr.gz`` file.
    """
    kind, _, rest = spec.partition(":")
    if kind == "random":
        p = _params(rest)
        g = gen_random_graph(
            int(p["n"]), int(p["m"]), int(p.get("lo", 1)), int(p.get("hi", 1000)),
            float(p.get("filler", 100_000)), int(p.get("seed", seed)),
        )
        return spec, LoadedInstance(g)
    if kind == "grid":
        p = _params(rest)
        g = gen_grid_graph(int(p["rows"]), int(p["cols"]), float(p.get("drop", 0.1)), int(p.get("seed", seed)))
        return spec, LoadedInstance(g)
    if kind == "hard":
        g, inst, pred = gen_hard_instance(int(_params(rest)["k"]))
        return spec, LoadedInstance(g, inst.arrivals, pred)
    if kind == "digraph":
        p = _params(rest)
        n = int(p["n"])
        g = gen_random_digraph(n, int(p.get("extra", 2 * n)), seed=int(p.get("seed", seed)))
        return spec, LoadedInstance(g)
    if kind == "road":
        p = _params(rest)
        g = parse_dimacs(p["gr"], p.get("co"))
        if "w" in p or "h" in p:
            g, _ = sample_rectangle_subgraph(g, float(p.get("w", 1)), float(p.get("h", 1)), int(p.get("seed", seed)))
        return spec, LoadedInstance(g)
    path = Path(spec)
    if path.suffix == ".json":
        return path.stem, load_instance(path)
    if path.name.endswith((".gr", ".gr.gz")):
        co = Path(str(path).replace(".gr", ".co"))
        return path.name, LoadedInstance(parse_dimacs(path, co if co.exists() else None))
    raise GraphError(f"unrecognised graph spec {spec!r}")
