"""Undirected connected graphs and the distance quantities the bounds use.

Node ids are opaque, totally ordered tokens.  Graphs loaded from text use
string tokens ordered lexicographically; graphs built in code may use any
mutually comparable ids (typically ints).
"""

from __future__ import annotations

import random
from collections import deque
from typing import Hashable, Iterable, Mapping

NodeId = Hashable


class GraphError(ValueError):
    """Raised for malformed or disconnected graph input."""


class Graph:
    """Immutable finite, connected, undirected simple graph."""

    __slots__ = ("_nodes", "_adj", "_edges")

    def __init__(self, nodes: Iterable[NodeId], edges: Iterable[tuple[NodeId, NodeId]]):
        adj: dict[NodeId, set] = {v: set() for v in nodes}
        seen = set()
        for u, w in edges:
            if u == w:
                raise GraphError(f"self-loop at {u!r}")
            key = frozenset((u, w))
            if key in seen:
                raise GraphError(f"duplicate edge {u!r} {w!r}")
            seen.add(key)
            adj.setdefault(u, set()).add(w)
            adj.setdefault(w, set()).add(u)
        if not adj:
            raise GraphError("graph has no nodes")
        self._nodes = tuple(sorted(adj))
        self._adj = {v: frozenset(adj[v]) for v in self._nodes}
        self._edges = frozenset(seen)
        if len(distances_from(self, self._nodes[0])) != len(self._nodes):
            raise GraphError("graph is disconnected")

    @property
    def nodes(self) -> tuple:
        """Nodes in ascending id order."""
        return self._nodes

    @property
    def edges(self) -> frozenset:
        """Undirected edges as two-element frozensets."""
        return self._edges

    @property
    def n(self) -> int:
        return len(self._nodes)

    @property
    def m(self) -> int:
        return len(self._edges)

    def neighbors(self, v: NodeId) -> frozenset:
        try:
            return self._adj[v]
        except KeyError:
            raise KeyError(f"unknown node {v!r}") from None

    def degree(self, v: NodeId) -> int:
        return len(self.neighbors(v))

    def max_degree(self) -> int:
        return max(len(a) for a in self._adj.values())

    def has_edge(self, u: NodeId, w: NodeId) -> bool:
        return w in self._adj.get(u, ())

    def __contains__(self, v) -> bool:
        return v in self._adj

    def sorted_edges(self) -> list[tuple]:
        """Edges as (low, high) tuples in ascending order."""
        return sorted(tuple(sorted(e)) for e in self._edges)

    def adjacency(self) -> Mapping[NodeId, frozenset]:
        return dict(self._adj)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._adj == other._adj

    def __hash__(self):
        return hash(self._edges) ^ hash(self._nodes)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def to_edge_list(self) -> str:
        lines = [f"{u} {w}" for u, w in self.sorted_edges()]
        if self.n == 1:
            lines.append(f"node {self._nodes[0]}")
        return "\n".join(lines) + "\n"


def load_graph(text: str) -> Graph:
    """Parse an edge list: one ``u w`` pair per line.

    Blank lines and lines starting with ``#`` are ignored.  ``node <token>``
    declares an isolated node, which is only legal for a one-node graph.
    """
    edges = []
    declared = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "node":
            if len(parts) != 2:
                raise GraphError(f"line {lineno}: expected 'node <token>'")
            declared.append(parts[1])
            continue
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected two tokens, got {len(parts)}")
        edges.append((parts[0], parts[1]))
    nodes = set(declared)
    for u, w in edges:
        nodes.update((u, w))
    if declared and len(nodes) > 1:
        isolated = [v for v in declared if not any(v in e for e in edges)]
        if isolated:
            raise GraphError(f"graph is disconnected (isolated node {isolated[0]!r})")
    return Graph(nodes, edges)


def distances_from(g: Graph, v: NodeId) -> dict:
    """BFS hop distances from ``v`` to every node."""
    g.neighbors(v)
    dist = {v: 0}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for w in g._adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def eccentricity(g: Graph, v: NodeId) -> int:
    return max(distances_from(g, v).values())


def diameter(g: Graph) -> int:
    return max(eccentricity(g, v) for v in g.nodes)


def cross_edges(g: Graph, v0: NodeId) -> set:
    """Edges whose endpoints are equidistant from ``v0``, as (low, high) tuples."""
    dist = distances_from(g, v0)
    return {(u, w) for u, w in g.sorted_edges() if dist[u] == dist[w]}


def bipartition(g: Graph):
    """Return a two-colouring ``(side_a, side_b)`` or ``None`` for odd cycles.

    ``side_a`` holds the smallest node id.
    """
    dist = distances_from(g, g.nodes[0])
    if any(dist[u] == dist[w] for u, w in g.edges):
        return None
    # connected graph: parity of BFS depth is the only 2-colouring
    even = {v for v, d in dist.items() if d % 2 == 0}
    return frozenset(even), frozenset(set(g.nodes) - even)


def is_bipartite(g: Graph) -> bool:
    return bipartition(g) is not None


def expected_forwards(g: Graph) -> int:
    """|E| on bipartite graphs, otherwise 2|E|."""
    return g.m if is_bipartite(g) else 2 * g.m


def path_graph(n: int) -> Graph:
    return Graph(range(n), [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph(range(n), [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(range(n), [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_connected_graph(n: int, rng: random.Random, p_extra: float = 0.3) -> Graph:
    """Random spanning tree on ``range(n)`` plus each other pair with prob ``p_extra``."""
    if n < 1:
        raise GraphError("n must be >= 1")
    order = list(range(n))
    rng.shuffle(order)
    edges = set()
    for i in range(1, n):
        u, w = order[i], order[rng.randrange(i)]
        edges.add((min(u, w), max(u, w)))
    for u in range(n):
        for w in range(u + 1, n):
            if (u, w) not in edges and rng.random() < p_extra:
                edges.add((u, w))
    return Graph(range(n), sorted(edges))
