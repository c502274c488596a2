"""Deterministic synchronous round executor.

Each round runs four phases: deliver last round's sends, inject scheduled
broadcasts, let every node decide its sends under the availability scheme,
toggle parities.  The global round counter lives only here; handlers never
see it.
"""

from __future__ import annotations

import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional

from .algorithms import HANDLER_NAMES, Message, MultiHandler, dedup_deliver, make_handler
from .graph import Graph, diameter
from .scheme import EMPTY, AvailabilityScheme

log = logging.getLogger(__name__)

BROADCAST, SEND, RECEIVE, DELIVER = "broadcast", "send", "receive", "deliver"
# phase order inside a round
_KIND_RANK = {RECEIVE: 0, DELIVER: 1, BROADCAST: 2, SEND: 3}

TERMINATED = "terminated"
ROUND_LIMIT = "round_limit_exceeded"
CYCLE = "cycle_detected"
PRECONDITION = "precondition_violated"


class ScenarioError(ValueError):
    """Invalid scenario configuration."""


@dataclass(frozen=True)
class Broadcast:
    node: Any
    round: int
    message: Message


@dataclass(frozen=True, order=True)
class Event:
    round: int
    kind: str
    node: Any
    peer: Any
    msg: Any

    def sort_key(self):
        return (self.round, _KIND_RANK[self.kind], self.node, _opt(self.peer), self.msg)

    def to_record(self) -> dict:
        if self.kind in (SEND, RECEIVE):
            src, dst = (self.node, self.peer) if self.kind == SEND else (self.peer, self.node)
            return {"round": self.round, "kind": self.kind, "from": src, "to": dst, "msg": self.msg}
        return {"round": self.round, "kind": self.kind, "node": self.node, "msg": self.msg}

    @classmethod
    def from_record(cls, rec: dict) -> "Event":
        kind = rec["kind"]
        if kind == SEND:
            return cls(rec["round"], kind, rec["from"], rec["to"], rec["msg"])
        if kind == RECEIVE:
            return cls(rec["round"], kind, rec["to"], rec["from"], rec["msg"])
        return cls(rec["round"], kind, rec["node"], None, rec["msg"])


def _opt(x):
    return (0,) if x is None else (1, x)


@dataclass(frozen=True)
class Outcome:
    kind: str
    last_activity_round: int = 0
    first_round: Optional[int] = None
    repeat_round: Optional[int] = None
    node: Any = None
    msg: Any = None
    round: Optional[int] = None

    def to_record(self) -> dict:
        rec = {"outcome": self.kind, "last_activity_round": self.last_activity_round}
        if self.kind == CYCLE:
            rec.update(first_round=self.first_round, repeat_round=self.repeat_round)
        if self.kind == PRECONDITION:
            rec.update(node=self.node, msg=self.msg, round=self.round)
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "Outcome":
        return cls(
            rec["outcome"],
            rec.get("last_activity_round", 0),
            rec.get("first_round"),
            rec.get("repeat_round"),
            rec.get("node"),
            rec.get("msg"),
            rec.get("round"),
        )

    def summary(self) -> str:
        if self.kind == CYCLE:
            return f"cycle_detected first_round={self.first_round} repeat_round={self.repeat_round}"
        if self.kind == PRECONDITION:
            return f"precondition_violated node={self.node} msg={self.msg} round={self.round}"
        return f"{self.kind} last_activity_round={self.last_activity_round}"


@dataclass
class ScenarioConfig:
    graph: Graph
    algorithm: str = "synafi"
    broadcasts: list = field(default_factory=list)
    scheme: AvailabilityScheme = EMPTY
    capacity_b: Optional[int] = None
    round_limit: Optional[int] = None
    initial_parities: Optional[dict] = None
    seed: int = 0

    def __post_init__(self):
        self.broadcasts = [b if isinstance(b, Broadcast) else Broadcast(*b) for b in self.broadcasts]
        self.broadcasts = [
            b if isinstance(b.message, Message) else Broadcast(b.node, b.round, Message(b.message))
            for b in self.broadcasts
        ]
        if not isinstance(self.scheme, AvailabilityScheme):
            self.scheme = AvailabilityScheme(self.scheme)
        self.validate()

    @property
    def is_multi(self) -> bool:
        return self.algorithm.startswith("multi:")

    def message_ids(self) -> list:
        return sorted({b.message.id for b in self.broadcasts})

    def effective_b(self) -> int:
        if self.capacity_b is not None:
            return self.capacity_b
        return 1 if self.is_multi else max(1, len(self.message_ids()))

    def effective_round_limit(self) -> int:
        if self.round_limit is not None:
            return self.round_limit
        last = max((b.round for b in self.broadcasts), default=0)
        return 4 * diameter(self.graph) + 2 * self.scheme.f + 10 + last

    def validate(self):
        if self.algorithm not in HANDLER_NAMES:
            raise ScenarioError(f"unknown algorithm {self.algorithm!r}")
        if self.capacity_b is not None and self.capacity_b < 1:
            raise ScenarioError("capacity b must be >= 1")
        if self.round_limit is not None and self.round_limit < 1:
            raise ScenarioError("round_limit must be >= 1")
        payloads = {}
        for b in self.broadcasts:
            if b.node not in self.graph:
                raise ScenarioError(f"broadcast at unknown node {b.node!r}")
            if b.round < 1:
                raise ScenarioError("broadcast rounds are 1-based")
            if payloads.setdefault(b.message.id, b.message.payload) != b.message.payload:
                raise ScenarioError(f"message id {b.message.id!r} used with different payloads")
        for v, _ in self.scheme.blocked:
            if v not in self.graph:
                raise ScenarioError(f"scheme blocks unknown node {v!r}")
        if self.initial_parities:
            for v in self.initial_parities:
                if v not in self.graph:
                    raise ScenarioError(f"parity for unknown node {v!r}")
        if not self.is_multi and self.effective_b() < len(self.message_ids()):
            raise ScenarioError(
                f"{self.algorithm} keeps no send queue; capacity b={self.effective_b()} is below "
                f"the {len(self.message_ids())} concurrent messages (use a multi:* handler)"
            )


@dataclass
class Trace:
    config: ScenarioConfig
    events: list
    outcome: Outcome
    terminated: bool
    violations: list = field(default_factory=list)
    # (round, node, msg) -> sender set held immediately before the send decision
    snapshots: Optional[dict] = None
    # node -> message ids left in the duplicate-suppression buffer
    dedup_residue: dict = field(default_factory=dict)
    # node -> message ids in selection order (multi handlers only)
    selections: dict = field(default_factory=dict)

    def of_kind(self, kind: str, msg=None) -> list:
        return [e for e in self.events if e.kind == kind and (msg is None or e.msg == msg)]

    def sends(self, msg=None) -> list:
        return self.of_kind(SEND, msg)

    def receives(self, msg=None) -> list:
        return self.of_kind(RECEIVE, msg)

    def message_ids(self) -> list:
        return sorted({e.msg for e in self.events})

    def to_jsonl(self) -> str:
        return "".join(line + "\n" for line in iter_jsonl(self))


def header_line(config: ScenarioConfig) -> str:
    return json.dumps(
        {"format_version": 1, "kind": "header", "algorithm": config.algorithm, "seed": config.seed},
        sort_keys=True,
    )


def event_line(event: Event) -> str:
    return json.dumps(event.to_record(), sort_keys=True)


def iter_jsonl(trace: Trace):
    yield header_line(trace.config)
    for e in trace.events:
        yield event_line(e)
    yield json.dumps(trace.outcome.to_record(), sort_keys=True)


def read_jsonl(text: str, config: ScenarioConfig) -> Trace:
    """Rebuild a Trace (without snapshots) from its JSON-lines form."""
    events, outcome = [], None
    for line in text.splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        if rec.get("kind") == "header":
            continue
        if "outcome" in rec:
            outcome = Outcome.from_record(rec)
        else:
            events.append(Event.from_record(rec))
    if outcome is None:
        raise ValueError("trace has no outcome record")
    violations = []
    if outcome.kind == PRECONDITION:
        violations.append((outcome.node, outcome.msg, outcome.round))
    return Trace(config, events, outcome, outcome.kind in (TERMINATED, PRECONDITION), violations)


class CycleDetector:
    """Remembers configuration digests and reports the first repetition."""

    def __init__(self):
        self._seen: dict = {}

    def observe(self, round: int, digest) -> Optional[tuple[int, int]]:
        key = (round % 2, digest)
        first = self._seen.get(key)
        if first is not None:
            return first, round
        self._seen[key] = round
        return None


def detect_cycle(history: Iterable[tuple[int, Any]], after_round: int = 0):
    """First ``(i, j)`` with equal digests at equal round parity, both > ``after_round``.

    ``history`` is a sequence of ``(round, digest)`` pairs in round order.
    """
    det = CycleDetector()
    for r, digest in history:
        if r <= after_round:
            continue
        hit = det.observe(r, digest)
        if hit:
            return hit
    return None


def run(
    config: ScenarioConfig,
    *,
    record_snapshots: bool = False,
    extra_silent_rounds: int = 0,
    sink: Optional[Callable[[Event], None]] = None,
    keep_events: bool = True,
) -> Trace:
    """Execute a scenario and return its trace.

    The configuration digest after each round's send phase is fed to the
    cycle detector once the run is autonomous (past the last blocked round
    and the last scheduled broadcast).  ``extra_silent_rounds`` keeps
    stepping after quiescence; used to test that quiescence is final.
    """
    g = config.graph
    scheme = config.scheme
    b = config.effective_b()
    handler = make_handler(config.algorithm, b)
    limit = config.effective_round_limit()
    parities = config.initial_parities or {}
    states = {v: handler.new_state(v, bool(parities.get(v, True))) for v in g.nodes}
    schedule = defaultdict(list)
    for bc in config.broadcasts:
        schedule[bc.round].append(bc)
    last_broadcast = max(schedule, default=0)
    autonomous_from = max(last_broadcast, scheme.last_blocked_round())

    events: list = []
    received_ids = defaultdict(set)
    buffers = {v: frozenset() for v in g.nodes}
    violations = []
    snapshots = {} if record_snapshots else None
    in_flight: list = []
    detector = CycleDetector()
    last_activity = 0
    outcome = None

    def emit(batch):
        nonlocal last_activity
        batch.sort(key=Event.sort_key)
        if batch:
            last_activity = batch[-1].round
        for e in batch:
            if sink is not None:
                sink(e)
            if keep_events:
                events.append(e)

    def quiescent(r):
        return (
            not in_flight
            and not any(handler.pending(states[v]) for v in g.nodes)
            and not any(rr >= r for rr in schedule)
        )

    r = 0
    silent_left = extra_silent_rounds
    while True:
        if quiescent(r + 1):
            if silent_left <= 0:
                outcome = Outcome(TERMINATED, last_activity)
                break
            silent_left -= 1
        r += 1
        if r > limit:
            outcome = Outcome(ROUND_LIMIT, last_activity)
            break
        batch = []

        for sender, receiver, m in in_flight:
            handler.receive(states[receiver], sender, m)
            received_ids[receiver].add(m.id)
            batch.append(Event(r, RECEIVE, receiver, sender, m.id))
            buffers[receiver], deliver = dedup_deliver(buffers[receiver], m)
            if deliver:
                batch.append(Event(r, DELIVER, receiver, None, m.id))
        in_flight = []

        for bc in sorted(schedule.get(r, ()), key=lambda x: (x.node, x.message.id)):
            ok = check_multisource_precondition(received_ids[bc.node], bc.message.id)
            accepted = handler.broadcast(states[bc.node], bc.message)
            if not (ok and accepted):
                violations.append((bc.node, bc.message.id, r))
                log.info("precondition violated: %r already holds %r at its broadcast in round %d",
                         bc.node, bc.message.id, r)
            batch.append(Event(r, BROADCAST, bc.node, None, bc.message.id))

        for v in g.nodes:
            st = states[v]
            if snapshots is not None:
                for mid, slot in handler.snapshot(st).items():
                    if slot is not None:
                        snapshots[(r, v, mid)] = slot
            sends = handler.send(st, g.neighbors(v), scheme.is_available(v, r))
            for m, receivers in sends:
                for w in sorted(receivers):
                    batch.append(Event(r, SEND, v, w, m.id))
                    in_flight.append((v, w, m))
            handler.end_round(st)
        in_flight.sort(key=lambda x: (x[1], x[0], x[2].id))
        emit(batch)

        if r > autonomous_from:
            digest = (
                tuple(handler.digest(states[v]) for v in g.nodes),
                tuple((s, t, m.id) for s, t, m in in_flight),
            )
            hit = detector.observe(r, digest)
            if hit:
                outcome = Outcome(CYCLE, last_activity, first_round=hit[0], repeat_round=hit[1])
                break

    terminated = outcome.kind == TERMINATED
    if violations and terminated:
        node, mid, vr = violations[0]
        outcome = Outcome(PRECONDITION, last_activity, node=node, msg=mid, round=vr)
    selections = {}
    if isinstance(handler, MultiHandler):
        selections = {v: list(states[v].selections) for v in g.nodes}
    return Trace(
        config=config,
        events=events,
        outcome=outcome,
        terminated=terminated,
        violations=violations,
        snapshots=snapshots,
        dedup_residue={v: sorted(buf) for v, buf in buffers.items() if buf},
        selections=selections,
    )


def check_multisource_precondition(received_ids: Iterable, message_id) -> bool:
    """True when the injecting node has not yet seen ``message_id``.

    ``received_ids`` covers every round up to and including the injection
    round, so a same-round arrival also counts as a violation.
    """
    return message_id not in set(received_ids)


def _first_broadcast_round(trace: Trace, msg) -> int:
    rounds = [e.round for e in trace.events if e.kind == BROADCAST and e.msg == msg]
    if not rounds:
        raise KeyError(f"message {msg!r} never broadcast in trace")
    return min(rounds)


def delivery_time(trace: Trace, msg, node) -> Optional[int]:
    """Rounds from the first broadcast of ``msg`` until ``node`` has it.

    An originator counts from its own broadcast round.  ``None`` if the node
    never obtains the message.
    """
    start = _first_broadcast_round(trace, msg)
    got = [
        e.round
        for e in trace.events
        if e.msg == msg and e.node == node and e.kind in (RECEIVE, BROADCAST)
    ]
    return min(got) - start if got else None


def termination_time(trace: Trace, msg) -> int:
    """Rounds from the first broadcast of ``msg`` until its last receipt."""
    start = _first_broadcast_round(trace, msg)
    last = max((e.round for e in trace.receives(msg)), default=start)
    return last - start
