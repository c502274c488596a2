"""Proof constructions as executable oracles.

* ``build_double_cover``: two copies of G where every cross edge w.r.t. the
  source is replaced by the two edges linking the copies.
* ``build_layered``: the layered bipartite graph that encodes a
  parity-buffered run under an availability scheme, with dummy vertices for
  blocked sends and per-vertex originator sets.
* ``build_source_extension``: pendant paths that turn a staggered
  multi-source broadcast into a simultaneous one.

The ``check_*`` functions compare simulator traces against these and return
a :class:`CheckReport`.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable, NamedTuple

from .engine import ScenarioConfig, Trace, run
from .graph import Graph, cross_edges, diameter, is_bipartite
from .scheme import EMPTY, AvailabilityScheme


class Copy(NamedTuple):
    """A vertex of the double cover: ``side`` 0 is the primary copy, 1 the mirror."""

    node: Any
    side: int

    def __str__(self):
        return f"{self.node}'" if self.side else str(self.node)


@dataclass(frozen=True)
class DoubleCover:
    base: Graph
    v0: Any
    adj: dict
    cross: frozenset
    dist: dict  # BFS depth from (v0, 0); mirror-only component absent

    @property
    def nodes(self) -> list:
        return sorted(self.adj)

    def edges(self) -> set:
        return {frozenset((a, b)) for a in self.adj for b in self.adj[a]}

    def neighbors(self, c: Copy) -> frozenset:
        return self.adj[c]

    def component_edges(self) -> set:
        """Edges reachable from the primary copy of ``v0``."""
        return {e for e in self.edges() if all(c in self.dist for c in e)}

    def successors(self, c: Copy) -> set:
        return {x for x in self.adj[c] if self.dist.get(x) == self.dist.get(c, -2) + 1}

    def predecessors(self, c: Copy) -> set:
        return {x for x in self.adj[c] if self.dist.get(x) == self.dist.get(c, -2) - 1}

    def is_bipartite(self) -> bool:
        colour = {}
        for start in self.nodes:
            if start in colour:
                continue
            colour[start] = 0
            stack = [start]
            while stack:
                a = stack.pop()
                for b in self.adj[a]:
                    if b not in colour:
                        colour[b] = 1 - colour[a]
                        stack.append(b)
                    elif colour[b] == colour[a]:
                        return False
        return True


def build_double_cover(g: Graph, v0) -> DoubleCover:
    cross = frozenset(cross_edges(g, v0))
    adj = defaultdict(set)
    for v in g.nodes:
        adj[Copy(v, 0)]
        adj[Copy(v, 1)]
    for u, w in g.sorted_edges():
        if (u, w) in cross:
            pairs = [(Copy(u, 0), Copy(w, 1)), (Copy(w, 0), Copy(u, 1))]
        else:
            pairs = [(Copy(u, 0), Copy(w, 0)), (Copy(u, 1), Copy(w, 1))]
        for a, b in pairs:
            adj[a].add(b)
            adj[b].add(a)
    adj = {c: frozenset(n) for c, n in adj.items()}
    # BFS orientation from the primary copy of v0
    dist = {Copy(v0, 0): 0}
    frontier = [Copy(v0, 0)]
    while frontier:
        nxt = []
        for a in frontier:
            for b in sorted(adj[a]):
                if b not in dist:
                    dist[b] = dist[a] + 1
                    nxt.append(b)
        frontier = nxt
    return DoubleCover(g, v0, adj, cross, dist)


@dataclass(frozen=True)
class Vertex:
    layer: int
    copy: Copy | None = None
    dummy: int | None = None

    @property
    def is_dummy(self) -> bool:
        return self.dummy is not None

    @property
    def base(self):
        return None if self.copy is None else self.copy.node

    def label(self) -> str:
        if self.is_dummy:
            return f"d{self.dummy}"
        return f"{self.copy}@{self.layer}"

    def sort_key(self):
        if self.is_dummy:
            return (self.layer, 1, (0,), self.dummy)
        return (self.layer, 0, self.copy, 0)


@dataclass
class LayeredGraph:
    cover: DoubleCover
    scheme: AvailabilityScheme
    origin_round: int
    layers: list
    edges: list
    originator: dict
    pred: dict = field(default_factory=dict)
    succ: dict = field(default_factory=dict)
    cap_hit: bool = False

    @property
    def depth(self) -> int:
        return max((i for i, layer in enumerate(self.layers) if layer), default=0)

    @property
    def dummies(self) -> list:
        return [v for layer in self.layers for v in layer if v.is_dummy]

    def vertices(self) -> list:
        return [v for layer in self.layers for v in layer]

    def non_dummy_edges(self) -> list:
        return [(a, b) for a, b in self.edges if not a.is_dummy and not b.is_dummy]

    def send_round(self, layer: int) -> int:
        return self.origin_round + layer


def build_layered(
    g: Graph, v0, s: AvailabilityScheme = EMPTY, origin_round: int = 1
) -> LayeredGraph:
    """Construct the layered graph for a single broadcast by ``v0`` in ``origin_round``.

    A copy in layer ``i`` sends in round ``origin_round + i``; the scheme is
    consulted for the base node, so mirror copies share their original's
    availability.  Construction stops at the first empty layer.
    """
    cover = build_double_cover(g, v0)
    cap = 2 * diameter(g) + 2 * s.f + 2
    root = Vertex(0, Copy(v0, 0))
    layers = [[root]]
    originator = {root: frozenset()}
    pred = defaultdict(list)
    succ = defaultdict(list)
    edges = []
    dummy_tag = 0
    cap_hit = False

    i = 0
    while layers[i]:
        if i + 1 > cap:
            cap_hit = True
            break
        copies: dict = {}
        dummies: list = []

        def copy_in_next(c: Copy) -> Vertex:
            if c not in copies:
                copies[c] = Vertex(i + 1, c)
            return copies[c]

        def link(a: Vertex, b: Vertex):
            edges.append((a, b))
            succ[a].append(b)
            pred[b].append(a)

        for v in layers[i]:
            if v.is_dummy:
                (w,) = pred[v]
                link(v, copy_in_next(w.copy))
                continue
            todo = cover.neighbors(v.copy) - originator[v]
            if not todo:
                continue
            if s.is_available(v.base, origin_round + i):
                for u in sorted(todo):
                    link(v, copy_in_next(u))
            else:
                d = Vertex(i + 1, dummy=dummy_tag)
                dummy_tag += 1
                dummies.append(d)
                link(v, d)

        nxt = sorted(copies.values(), key=Vertex.sort_key) + dummies
        for x in nxt:
            if x.is_dummy:
                (p,) = pred[x]
                originator[x] = originator[p]
            else:
                orig = set()
                for p in pred[x]:
                    if p.is_dummy:
                        orig |= originator[p]
                    else:
                        orig.add(p.copy)
                originator[x] = frozenset(orig)
        layers.append(nxt)
        i += 1

    return LayeredGraph(
        cover=cover,
        scheme=s,
        origin_round=origin_round,
        layers=layers,
        edges=edges,
        originator=originator,
        pred=dict(pred),
        succ=dict(succ),
        cap_hit=cap_hit,
    )


# -- reports ---------------------------------------------------------------


@dataclass
class CheckReport:
    name: str
    passed: bool
    mismatches: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    skipped: bool = False

    @property
    def status(self) -> str:
        if self.skipped:
            return "SKIP"
        return "PASS" if self.passed else "FAIL"

    def summary_line(self) -> str:
        return f"{self.name}: {self.status} mismatches={len(self.mismatches)}"

    def to_text(self) -> str:
        lines = [self.summary_line()]
        lines += [f"  note: {n}" for n in self.notes]
        lines += [f"  mismatch: {m}" for m in self.mismatches]
        return "\n".join(lines)


def _single_broadcast(trace: Trace):
    bcs = trace.config.broadcasts
    if len(bcs) != 1:
        raise ValueError("oracle checks need exactly one broadcast")
    return bcs[0]


def _check_matches(trace: Trace, lg: LayeredGraph):
    cfg = trace.config
    bc = _single_broadcast(trace)
    if cfg.graph != lg.cover.base or cfg.scheme != lg.scheme:
        raise ValueError("trace and layered graph disagree on graph or scheme")
    if bc.node != lg.cover.v0 or bc.round != lg.origin_round:
        raise ValueError("trace and layered graph disagree on the broadcast")
    return bc


def expected_sends(lg: LayeredGraph) -> set:
    """``(round, sender, receiver)`` for every copy-to-copy edge."""
    return {(lg.send_round(a.layer), a.base, b.base) for a, b in lg.non_dummy_edges()}


def check_send_equivalence(trace: Trace, lg: LayeredGraph) -> CheckReport:
    """Sends in the trace must be exactly the copy-to-copy edges, layer i -> round origin+i."""
    bc = _check_matches(trace, lg)
    actual = [(e.round, e.node, e.peer) for e in trace.sends(bc.message.id)]
    expected = expected_sends(lg)
    mismatches = []
    if len(actual) != len(set(actual)):
        mismatches.append(("duplicate send events",))
    actual = set(actual)
    mismatches += [("missing", x) for x in sorted(expected - actual)]
    mismatches += [("unexpected", x) for x in sorted(actual - expected)]
    return CheckReport("send_equivalence", not mismatches, mismatches)


def check_m_equals_originator(trace: Trace, lg: LayeredGraph) -> CheckReport:
    """Pre-send sender sets must equal the projected originator sets, copy by copy."""
    bc = _check_matches(trace, lg)
    if trace.snapshots is None:
        raise ValueError("trace was recorded without snapshots")
    mid = bc.message.id
    actual = {(r, v): slot for (r, v, m), slot in trace.snapshots.items() if m == mid}
    expected = {}
    for x in lg.vertices():
        if not x.is_dummy:
            key = (lg.send_round(x.layer), x.base)
            expected[key] = frozenset(c.node for c in lg.originator[x])
    g = lg.cover.base
    mismatches, notes = [], []
    for key in sorted(set(actual) | set(expected)):
        a, e = actual.get(key), expected.get(key)
        if a == e:
            continue
        if e is None and a == g.neighbors(key[1]):
            # a full sender set held through a blocked round sends nothing;
            # the layered graph gives such a copy no successor at all
            notes.append(f"saturated slot held at {key}")
            continue
        mismatches.append((key, _fmt(a), _fmt(e)))
    return CheckReport("m_equals_originator", not mismatches, mismatches, notes)


def _fmt(s):
    return None if s is None else sorted(s)


def check_layer_structure(lg: LayeredGraph) -> CheckReport:
    """Structural invariants of the layered graph and the edge bijection with the cover."""
    problems = []
    cover = lg.cover
    if lg.cap_hit:
        problems.append("layer cap hit")
    if [v.copy for v in lg.layers[0]] != [Copy(cover.v0, 0)] or lg.originator[lg.layers[0][0]]:
        problems.append("layer 0 must be the source with an empty originator")
    for i, layer in enumerate(lg.layers):
        copies = [v.copy for v in layer if not v.is_dummy]
        if len(copies) != len(set(copies)):
            problems.append(f"layer {i} repeats a copy")
    for a, b in lg.edges:
        if b.layer != a.layer + 1:
            problems.append(f"edge {a.label()}->{b.label()} skips layers")
    for d in lg.dummies:
        preds = lg.pred.get(d, [])
        if len(preds) != 1 or lg.originator[d] != lg.originator[preds[0]]:
            problems.append(f"dummy {d.label()} bookkeeping")
    for x in lg.vertices():
        if x.is_dummy:
            continue
        succs = lg.succ.get(x, [])
        if any(s.is_dummy for s in succs):
            # blocked copy: its single successor is a dummy
            continue
        nbrs = cover.neighbors(x.copy)
        if lg.originator[x] | {s.copy for s in succs} != nbrs:
            problems.append(f"originator+succ of {x.label()} != cover neighbourhood")
        if not any(p.is_dummy for p in lg.pred.get(x, [])) and x.layer > 0:
            if {p.copy for p in lg.pred.get(x, [])} | {s.copy for s in succs} != nbrs:
                problems.append(f"pred+succ of {x.label()} != cover neighbourhood")

    carrier = cover.edges() if not is_bipartite(cover.base) else cover.component_edges()
    projected = [frozenset((a.copy, b.copy)) for a, b in lg.non_dummy_edges()]
    if len(projected) != len(set(projected)) or set(projected) != carrier:
        problems.append(
            f"copy edges {len(projected)} do not map one-to-one onto {len(carrier)} cover edges"
        )
    if len(lg.edges) != len(carrier) + 2 * len(lg.dummies):
        problems.append("edge count is not cover edges + 2 per dummy")
    notes = [
        f"depth={lg.depth} dummies={len(lg.dummies)} f={lg.scheme.f} "
        f"edges={len(lg.edges)} cover_edges={len(carrier)}"
    ]
    return CheckReport("layer_structure", not problems, problems, notes)


def effective_faults(trace: Trace) -> int:
    """Blocked pairs at which the node held a message with receivers left."""
    if trace.snapshots is None:
        raise ValueError("trace was recorded without snapshots")
    scheme = trace.config.scheme
    g = trace.config.graph
    return len(
        {
            (v, r)
            for (r, v, _m), slot in trace.snapshots.items()
            if not scheme.is_available(v, r) and slot != g.neighbors(v)
        }
    )


# -- staggered multi-source ------------------------------------------------


def _path_ids(g: Graph, count: int, anchor) -> list:
    sample = g.nodes[0]
    if isinstance(sample, int) and not isinstance(sample, bool):
        start = max(g.nodes) + 1
        return list(range(start, start + count))
    if isinstance(sample, str):
        taken = set(g.nodes)
        out = []
        k = 0
        while len(out) < count:
            cand = f"{anchor}~{k}"
            if cand not in taken:
                out.append(cand)
                taken.add(cand)
            k += 1
        return out
    raise TypeError("source extension needs int or str node ids")


def build_source_extension(g: Graph, broadcasts: Iterable[tuple]) -> tuple[Graph, list]:
    """Attach a path of ``r_i - min r`` fresh nodes to each late source.

    Returns ``(extended_graph, seeds)``: seeds are the far path ends plus the
    sources that broadcast in the earliest round.
    """
    broadcasts = [(v, r) for v, r in broadcasts]
    if not broadcasts:
        return g, []
    r0 = min(r for _, r in broadcasts)
    edges = list(g.sorted_edges())
    nodes = list(g.nodes)
    seeds = []
    for v, r in sorted(broadcasts, key=lambda x: (x[1], x[0])):
        k = r - r0
        if k == 0:
            seeds.append(v)
            continue
        path = _path_ids(Graph(nodes, edges), k, v)
        nodes += path
        # path[0] is the far end, path[-1] touches v
        edges += list(zip(path, path[1:])) + [(path[-1], v)]
        seeds.append(path[0])
    return Graph(nodes, edges), seeds


def check_multisource_equivalence(
    g: Graph,
    broadcasts: Iterable[tuple],
    algorithm: str = "synaf",
    scheme: AvailabilityScheme = EMPTY,
    msg="m",
) -> CheckReport:
    """Staggered sources on G vs simultaneous seeds on the extended graph.

    Compares the sends along edges of G, round by round.
    """
    broadcasts = list(broadcasts)
    staggered = run(ScenarioConfig(g, algorithm, [(v, r, msg) for v, r in broadcasts], scheme))
    name = "multisource_equivalence"
    if staggered.violations:
        return CheckReport(name, True, notes=[f"skipped: precondition violated {staggered.violations[0]}"], skipped=True)
    ext, seeds = build_source_extension(g, broadcasts)
    r0 = min(r for _, r in broadcasts)
    limit = staggered.config.effective_round_limit() + max(r for _, r in broadcasts)
    simultaneous = run(
        ScenarioConfig(ext, algorithm, [(s, r0, msg) for s in seeds], scheme, round_limit=limit)
    )
    in_g = set(g.nodes)
    a = sorted((e.round, e.node, e.peer) for e in staggered.sends(msg))
    b = sorted(
        (e.round, e.node, e.peer)
        for e in simultaneous.sends(msg)
        if e.node in in_g and e.peer in in_g
    )
    mismatches = [("only_staggered", x) for x in sorted(set(a) - set(b))]
    mismatches += [("only_extended", x) for x in sorted(set(b) - set(a))]
    notes = [f"extended graph n={ext.n} seeds={len(seeds)} g_sends={len(a)}"]
    if not (staggered.terminated and simultaneous.terminated):
        mismatches.append(("not terminated", staggered.outcome.kind, simultaneous.outcome.kind))
    return CheckReport(name, not mismatches, mismatches, notes)


# -- DOT export ------------------------------------------------------------


def _q(x) -> str:
    return '"' + str(x).replace('"', '\\"') + '"'


def double_cover_to_dot(cover: DoubleCover) -> str:
    lines = ["graph double_cover {"]
    for c in cover.nodes:
        attrs = "mirror=true, style=dotted" if c.side else ""
        lines.append(f"  {_q(c)} [{attrs}];" if attrs else f"  {_q(c)};")
    for a, b in sorted(tuple(sorted(e)) for e in cover.edges()):
        cross = tuple(sorted((a.node, b.node))) in cover.cross
        lines.append(f"  {_q(a)} -- {_q(b)}" + (" [cross=true, style=dashed];" if cross else ";"))
    lines.append("}")
    return "\n".join(lines) + "\n"


def layered_to_dot(lg: LayeredGraph) -> str:
    lines = ["digraph layered {", "  rankdir=TB;"]
    for i, layer in enumerate(lg.layers):
        if not layer:
            continue
        names = []
        for v in layer:
            orig = ",".join(sorted(str(c) for c in lg.originator[v]))
            if v.is_dummy:
                lines.append(f"  {_q(v.label())} [shape=box, style=dashed, dummy=true, originator={_q(orig)}];")
            else:
                lines.append(f"  {_q(v.label())} [label={_q(v.copy)}, originator={_q(orig)}];")
            names.append(_q(v.label()))
        lines.append(f"  {{rank=same; {'; '.join(names)};}}")
    for a, b in lg.edges:
        lines.append(f"  {_q(a.label())} -> {_q(b.label())};")
    lines.append("}")
    return "\n".join(lines) + "\n"
