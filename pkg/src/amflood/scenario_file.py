"""JSON scenario documents.

Example::

    {
      "format_version": 1,
      "graph": "a b\\nb c",
      "algorithm": "synafi",
      "b": 1,
      "broadcasts": [{"node": "a", "round": 1, "msg": "m"}],
      "scheme": [{"node": "b", "round": 2}],
      "round_limit": null,
      "parities": {"c": false},
      "seed": 0
    }

``graph`` is a path relative to the scenario file or, when no such file
exists, an inline edge list. The object forms ``{"path": ...}`` and
``{"edges": ...}`` are accepted too.  Node ids from edge lists are strings.
"""

from __future__ import annotations

import json
from pathlib import Path

from .algorithms import Message
from .engine import Broadcast, ScenarioConfig, ScenarioError
from .graph import Graph, load_graph
from .scheme import AvailabilityScheme

FORMAT_VERSION = 1


def _graph_from(source, base_dir: Path) -> Graph:
    if isinstance(source, dict):
        if "edges" in source:
            return load_graph(source["edges"])
        source = source["path"]
    if not isinstance(source, str):
        raise ScenarioError("graph must be a string or an object with a path or edges key")
    path = base_dir / source
    if "\n" in source or not path.is_file():
        return load_graph(source)
    return load_graph(path.read_text())


def scenario_from_dict(doc: dict, base_dir: Path | str = ".") -> ScenarioConfig:
    version = doc.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ScenarioError(f"unsupported scenario format_version {version}")
    unknown = set(doc) - {
        "format_version", "graph", "algorithm", "b", "broadcasts",
        "scheme", "round_limit", "parities", "seed",
    }
    if unknown:
        raise ScenarioError(f"unknown scenario keys: {sorted(unknown)}")
    g = _graph_from(doc["graph"], Path(base_dir))
    broadcasts = [
        Broadcast(
            str(b["node"]),
            int(b["round"]),
            Message(b["msg"], str(b.get("payload", "")).encode()),
        )
        for b in doc.get("broadcasts", [])
    ]
    scheme = AvailabilityScheme((str(p["node"]), int(p["round"])) for p in doc.get("scheme", []))
    parities = {str(k): bool(v) for k, v in (doc.get("parities") or {}).items()}
    return ScenarioConfig(
        graph=g,
        algorithm=doc.get("algorithm", "synafi"),
        broadcasts=broadcasts,
        scheme=scheme,
        capacity_b=doc.get("b"),
        round_limit=doc.get("round_limit"),
        initial_parities=parities or None,
        seed=int(doc.get("seed", 0)),
    )


def load_scenario(path: Path | str) -> ScenarioConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    return scenario_from_dict(doc, path.parent)


def scenario_to_dict(config: ScenarioConfig) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "graph": config.graph.to_edge_list(),
        "algorithm": config.algorithm,
        "b": config.capacity_b,
        "broadcasts": [
            {"node": b.node, "round": b.round, "msg": b.message.id}
            | ({"payload": b.message.payload.decode()} if b.message.payload else {})
            for b in config.broadcasts
        ],
        "scheme": config.scheme.to_records(),
        "round_limit": config.round_limit,
        "parities": config.initial_parities or {},
        "seed": config.seed,
    }


def dump_scenario(config: ScenarioConfig) -> str:
    return json.dumps(scenario_to_dict(config), indent=2, sort_keys=True) + "\n"
