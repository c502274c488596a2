"""Trace analytics and verdicts against the forward-count and round bounds."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Optional

from .engine import ScenarioConfig, Trace, delivery_time, termination_time
from .graph import diameter, eccentricity, expected_forwards

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


@dataclass
class MessageReport:
    msg: Any
    sources: list
    forwards: int
    expected_forwards: int
    forwards_rule: Optional[str]  # "exact", "cap" or None
    delivery_max: Optional[int]
    delivery_bound: Optional[int]
    termination: int
    termination_bound: Optional[int]
    max_edge_use: int
    verdict: str = PASS
    reasons: list = field(default_factory=list)

    def line(self) -> str:
        rule = {"exact": "==", "cap": "<=", None: "~"}[self.forwards_rule]
        return (
            f"msg={self.msg} verdict={self.verdict} forwards={self.forwards}{rule}{self.expected_forwards} "
            f"delivery={self.delivery_max}<={self.delivery_bound} "
            f"termination={self.termination}<={self.termination_bound} max_edge_use={self.max_edge_use}"
            + (f" ({'; '.join(self.reasons)})" if self.reasons else "")
        )


@dataclass
class BoundReport:
    messages: dict

    @property
    def passed(self) -> bool:
        return all(r.verdict != FAIL for r in self.messages.values())

    def verdicts(self) -> dict:
        return {m: r.verdict for m, r in self.messages.items()}

    def to_text(self) -> str:
        lines = [r.line() for r in self.messages.values()]
        counts = Counter(r.verdict for r in self.messages.values())
        lines.append(
            f"bounds: {'PASS' if self.passed else 'FAIL'} "
            f"pass={counts[PASS]} fail={counts[FAIL]} skipped={counts[SKIPPED]}"
        )
        return "\n".join(lines)


def edge_usage(trace: Trace, msg) -> Counter:
    """Send count per undirected edge for one message."""
    return Counter(frozenset((e.node, e.peer)) for e in trace.sends(msg))


def directed_edge_usage(trace: Trace, msg) -> Counter:
    return Counter((e.node, e.peer) for e in trace.sends(msg))


def _bounds(config: ScenarioConfig, sources: list):
    """Forward rule and round bounds for one message id, or a skip reason."""
    g = config.graph
    f = config.scheme.f
    diam = diameter(g)
    single = len(sources) == 1
    alg = config.algorithm
    if alg == "naive":
        return None, "no guarantee for the naive deferral"
    if alg == "synaf":
        if f:
            return None, "plain amnesiac flooding has no guarantee under blocking"
        if single:
            ecc = eccentricity(g, sources[0][0])
            return ("exact", ecc, ecc + diam + 1), None
        return ("cap", diam, 2 * diam + 1), None
    if alg == "synafi":
        return ("exact" if single else "cap", diam + 2 * f, 2 * diam + 2 * f + 1), None
    # message-table variants: eventual delivery only
    return ("exact" if single else "cap", None, None), None


def analyze(trace: Trace, config: ScenarioConfig | None = None) -> BoundReport:
    """Per-message forward counts, delivery and termination times with verdicts."""
    config = config or trace.config
    if not trace.terminated:
        raise ValueError(f"cannot analyse a run that did not terminate ({trace.outcome.kind})")
    g = config.graph
    violated = {mid for _, mid, _ in trace.violations}
    reports = {}
    for mid in config.message_ids():
        sources = sorted({(b.node, b.round) for b in config.broadcasts if b.message.id == mid},
                         key=lambda x: (x[1], x[0]))
        forwards = len(trace.sends(mid))
        deliveries = [delivery_time(trace, mid, v) for v in g.nodes]
        delivery_max = None if None in deliveries else max(deliveries)
        usage = edge_usage(trace, mid)
        rep = MessageReport(
            msg=mid,
            sources=sources,
            forwards=forwards,
            expected_forwards=expected_forwards(g) if len(sources) == 1 else 2 * g.m,
            forwards_rule=None,
            delivery_max=delivery_max,
            delivery_bound=None,
            termination=termination_time(trace, mid),
            termination_bound=None,
            max_edge_use=max(usage.values(), default=0),
        )
        reports[mid] = rep
        if mid in violated:
            rep.verdict = SKIPPED
            rep.reasons.append("multi-source precondition violated")
            continue
        rule, skip = _bounds(config, sources)
        if skip:
            rep.verdict = SKIPPED
            rep.reasons.append(skip)
            continue
        rep.forwards_rule, rep.delivery_bound, rep.termination_bound = rule
        if rep.forwards_rule == "exact" and forwards != rep.expected_forwards:
            rep.reasons.append("forward count differs from |E|/2|E|")
        if rep.forwards_rule == "cap" and forwards > rep.expected_forwards:
            rep.reasons.append("forward count above 2|E|")
        if delivery_max is None:
            rep.reasons.append("not delivered to every node")
        elif rep.delivery_bound is not None and delivery_max > rep.delivery_bound:
            rep.reasons.append("delivery bound exceeded")
        if rep.termination_bound is not None and rep.termination > rep.termination_bound:
            rep.reasons.append("termination bound exceeded")
        if rep.max_edge_use > 2:
            rep.reasons.append("an edge carried the message more than twice")
        if rep.reasons:
            rep.verdict = FAIL
    return BoundReport(reports)


def receipts_per_node(trace: Trace, msg) -> Counter:
    """How many times each node received ``msg`` (duplicate-delivery accounting)."""
    return Counter(e.node for e in trace.receives(msg))
