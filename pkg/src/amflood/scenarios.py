"""Canonical worked scenarios: the six-node non-termination example and the FIFO counterexample."""

from __future__ import annotations

import itertools

from .engine import ScenarioConfig
from .graph import Graph
from .scheme import AvailabilityScheme

SIX_NODE_NODES = tuple(f"v{i}" for i in range(6))
# edges that every reconstruction must contain: N(v0) holds v1, v2, v3 and N(v2) holds v0, v1, v5
SIX_NODE_KNOWN_EDGES = (("v0", "v1"), ("v0", "v2"), ("v0", "v3"), ("v1", "v2"), ("v2", "v5"))
SIX_NODE_EXTRA_EDGES = (("v1", "v4"), ("v1", "v5"), ("v3", "v4"), ("v4", "v5"))
SIX_NODE_BLOCKED = (("v2", 2), ("v2", 3), ("v2", 4), ("v3", 2))


def six_node_graph() -> Graph:
    """The six-node example graph with its partly reconstructed edge set.

    The extra edges form the sparsest completion on which the naive deferral
    repeats its round-5 configuration in round 9 and plain flooding needs 4
    rounds without blocking. The layered graph then also gets four dummies,
    and v2 holds the sender set {v1, v5} before its round-5 send.
    """
    return Graph(SIX_NODE_NODES, SIX_NODE_KNOWN_EDGES + SIX_NODE_EXTRA_EDGES)


def six_node_scheme() -> AvailabilityScheme:
    return AvailabilityScheme(SIX_NODE_BLOCKED)


def six_node_config(algorithm: str = "naive", blocked: bool = True) -> ScenarioConfig:
    scheme = six_node_scheme() if blocked else AvailabilityScheme()
    return ScenarioConfig(six_node_graph(), algorithm, [("v0", 1, "m")], scheme)


def six_node_completions():
    """All connected graphs on v0..v5 containing the known edges, with N(v0), N(v2) fixed."""
    free = [p for p in itertools.combinations(("v1", "v3", "v4", "v5"), 2)]
    for k in range(len(free) + 1):
        for extra in itertools.combinations(free, k):
            try:
                yield Graph(SIX_NODE_NODES, SIX_NODE_KNOWN_EDGES + extra)
            except ValueError:
                continue


def fifo_config(algorithm: str = "synafi", blocked: bool = True, capacity_b=None) -> ScenarioConfig:
    """Path v0 - w - u; v0 broadcasts m then m2 one round later; w blocked when m arrives."""
    g = Graph(("u", "v0", "w"), [("v0", "w"), ("w", "u")])
    scheme = AvailabilityScheme([("w", 2)] if blocked else [])
    return ScenarioConfig(
        g, algorithm, [("v0", 1, "m"), ("v0", 2, "m2")], scheme, capacity_b=capacity_b
    )
