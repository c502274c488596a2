"""Per-node protocol handlers for the amnesiac flooding family.

Sender sets use ``None`` for the "nothing arrived" marker (written ⊥ below)
and a frozenset otherwise; the empty frozenset marks a node's own broadcast.

The module-level functions are pure state transitions.  The ``*Handler``
classes adapt them to the engine's per-node hooks:

    receive(state, sender, message)
    broadcast(state, message) -> accepted
    snapshot(state) -> {msg_id: pre-send sender set}
    send(state, neighbors, available) -> [(message, receivers)]
    end_round(state)
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Hashable, Iterable, Mapping

MessageId = Hashable
BOTTOM = None

HANDLER_NAMES = ("synaf", "naive", "synafi", "multi:smallest", "multi:fair")


@dataclass(frozen=True, order=True)
class Message:
    id: Any
    payload: bytes = b""


def add_sender(slot: frozenset | None, w) -> frozenset:
    """Insert ``w``; inserting into ⊥ yields ``{w}``."""
    if slot is BOTTOM:
        return frozenset((w,))
    return slot | {w}


def receivers_for(slot: frozenset, neighbors: frozenset) -> frozenset:
    return frozenset(neighbors) - slot


# -- SynAF -----------------------------------------------------------------


def synaf_decide(received: Mapping[MessageId, Iterable], neighbors: Iterable) -> dict:
    """One stateless round: forward each message to the neighbours it did not come from.

    ``received`` maps message id to this round's sender set (empty for a
    broadcast).  Returns ``{msg_id: receivers}``, omitting messages received
    from every neighbour.
    """
    nbrs = frozenset(neighbors)
    out = {}
    for mid, senders in received.items():
        senders = frozenset(senders)
        if senders != nbrs:
            out[mid] = nbrs - senders
    return out


# -- SynAFI ----------------------------------------------------------------


@dataclass(frozen=True)
class SynAFIState:
    parity: bool = True
    m_true: frozenset | None = BOTTOM
    m_false: frozenset | None = BOTTOM

    def slot(self, parity: bool | None = None):
        p = self.parity if parity is None else parity
        return self.m_true if p else self.m_false

    def with_slot(self, value, parity: bool | None = None) -> "SynAFIState":
        p = self.parity if parity is None else parity
        return replace(self, m_true=value) if p else replace(self, m_false=value)

    def toggled(self) -> "SynAFIState":
        return replace(self, parity=not self.parity)

    @property
    def idle(self) -> bool:
        return self.m_true is BOTTOM and self.m_false is BOTTOM


def synafi_on_receive(state: SynAFIState, sender) -> SynAFIState:
    return state.with_slot(add_sender(state.slot(), sender))


def synafi_on_broadcast(state: SynAFIState) -> tuple[SynAFIState, bool]:
    """Mark an own broadcast in the current parity slot.

    A slot already holding senders wins and the broadcast is dropped.
    """
    if state.slot() is not BOTTOM:
        return state, False
    return state.with_slot(frozenset()), True


def synafi_decide(state: SynAFIState, neighbors: Iterable, available: bool):
    """Return ``(state, receivers)``; receivers is ``None`` when nothing is sent.

    A blocked slot is left untouched, so it is retried at the next
    available round of the same parity.
    """
    slot = state.slot()
    if not available or slot is BOTTOM:
        return state, None
    return state.with_slot(BOTTOM), receivers_for(slot, frozenset(neighbors))


# -- naive deferral --------------------------------------------------------


def naive_deferred_decide(slot: frozenset | None, neighbors: Iterable, available: bool):
    """Single accumulating sender set, flushed at the first available round.

    Returns ``(slot, receivers)``.  Does not terminate in general.
    """
    if not available or slot is BOTTOM:
        return slot, None
    return BOTTOM, receivers_for(slot, frozenset(neighbors))


# -- multi-message (messTbl) -----------------------------------------------

SMALLEST_ID = "smallest"
FAIR = "fair"


@dataclass(frozen=True)
class MessTblEntry:
    message: Message
    list_true: frozenset | None = BOTTOM
    list_false: frozenset | None = BOTTOM

    def get(self, parity: bool):
        return self.list_true if parity else self.list_false

    def set(self, parity: bool, value) -> "MessTblEntry":
        return replace(self, list_true=value) if parity else replace(self, list_false=value)


@dataclass(frozen=True)
class MultiState:
    parity: bool = True
    tbl: Mapping = field(default_factory=dict)
    policy: str = SMALLEST_ID
    capacity_b: int = 1
    # round-robin order of entry ids; only used by the fair policy
    queue: tuple = ()

    def __post_init__(self):
        if self.capacity_b < 1:
            raise ValueError("capacity_b must be >= 1")
        if self.policy not in (SMALLEST_ID, FAIR):
            raise ValueError(f"unknown selection policy {self.policy!r}")


def _select(tbl: dict, queue: list, parity: bool, policy: str, b: int) -> list:
    order = queue if policy == FAIR else sorted(tbl)
    return [mid for mid in order if tbl[mid].get(parity) is not BOTTOM][:b]


def messtbl_round(
    state: MultiState,
    receipts: Iterable[tuple[Any, Message]],
    broadcasts: Iterable[Message],
    neighbors: Iterable,
    available: bool,
):
    """Run one full round of the message-table algorithm at one node.

    Returns ``(new_state, sends)`` with ``sends`` a list of
    ``(message, receivers)`` in selection order.
    """
    nbrs = frozenset(neighbors)
    p = state.parity
    tbl = dict(state.tbl)
    queue = list(state.queue)
    created = []

    for w, m in receipts:
        entry = tbl.get(m.id)
        if entry is None:
            entry = MessTblEntry(m)
            created.append(m.id)
        tbl[m.id] = entry.set(p, add_sender(entry.get(p), w))
    for m in broadcasts:
        entry = tbl.get(m.id)
        if entry is None:
            tbl[m.id] = MessTblEntry(m, frozenset(), frozenset())
            created.append(m.id)
        elif entry.get(p) is BOTTOM:
            tbl[m.id] = entry.set(p, frozenset())
        # else: a same-round receipt already holds the slot; broadcast dropped

    queue.extend(sorted(set(created)))
    for mid in list(tbl):
        entry = tbl[mid]
        if entry.get(p) == nbrs:
            entry = entry.set(p, BOTTOM)
            tbl[mid] = entry
        if entry.list_true is BOTTOM and entry.list_false is BOTTOM:
            del tbl[mid]

    sends = []
    if available:
        chosen = _select(tbl, [q for q in queue if q in tbl], p, state.policy, state.capacity_b)
        for mid in chosen:
            entry = tbl[mid]
            sends.append((entry.message, receivers_for(entry.get(p), nbrs)))
            entry = entry.set(p, BOTTOM)
            other = entry.get(not p)
            if other is BOTTOM or other == frozenset():
                del tbl[mid]
            else:
                tbl[mid] = entry
        if state.policy == FAIR:
            # selected survivors go to the back of the line
            queue = [q for q in queue if q not in chosen] + chosen
    queue = [q for q in queue if q in tbl]

    new = replace(state, parity=not p, tbl=tbl, queue=tuple(queue) if state.policy == FAIR else ())
    return new, sends


# -- duplicate-delivery suppression ----------------------------------------


def dedup_deliver(buffer: frozenset, m: Message) -> tuple[frozenset, bool]:
    """Toggle ``m.id`` in the buffer; deliver only when it was absent."""
    if m.id in buffer:
        return buffer - {m.id}, False
    return buffer | {m.id}, True


# -- engine adapters -------------------------------------------------------


class _PerMessageNode:
    """Node state for handlers that keep one independent slot set per message."""

    __slots__ = ("parity", "msgs", "store", "inbox", "outbox")

    def __init__(self, parity: bool):
        self.parity = parity
        self.msgs: dict = {}
        self.store: dict = {}
        self.inbox: dict = {}
        self.outbox: set = set()


class SynAFHandler:
    """Amnesiac flooding.  Stateless: a blocked node simply forgets its sends."""

    name = "synaf"
    single_message_state = True

    def new_state(self, node, parity: bool):
        return _PerMessageNode(parity)

    def receive(self, st, sender, m: Message):
        st.store[m.id] = m
        st.inbox.setdefault(m.id, set()).add(sender)

    def broadcast(self, st, m: Message) -> bool:
        st.store[m.id] = m
        if m.id in st.inbox:
            return False
        st.outbox.add(m.id)
        return True

    def _pending_sets(self, st):
        sets = {mid: frozenset(s) for mid, s in st.inbox.items()}
        for mid in st.outbox:
            sets[mid] = frozenset()
        return sets

    def snapshot(self, st) -> dict:
        return self._pending_sets(st)

    def send(self, st, neighbors, available: bool) -> list:
        sets = self._pending_sets(st)
        st.inbox = {}
        st.outbox = set()
        if not available:
            return []
        out = synaf_decide(sets, neighbors)
        return [(st.store[mid], r) for mid, r in sorted(out.items())]

    def end_round(self, st):
        st.parity = not st.parity

    def pending(self, st) -> bool:
        return bool(st.inbox or st.outbox)

    def digest(self, st):
        return (st.parity,)


class NaiveHandler(SynAFHandler):
    """SynAF that postpones blocked sends into one ever-growing sender set."""

    name = "naive"

    def receive(self, st, sender, m: Message):
        st.store[m.id] = m
        st.msgs[m.id] = add_sender(st.msgs.get(m.id, BOTTOM), sender)

    def broadcast(self, st, m: Message) -> bool:
        st.store[m.id] = m
        if st.msgs.get(m.id, BOTTOM) is not BOTTOM:
            return False
        st.msgs[m.id] = frozenset()
        return True

    def snapshot(self, st) -> dict:
        return dict(st.msgs)

    def send(self, st, neighbors, available: bool) -> list:
        out = []
        for mid in sorted(st.msgs):
            slot, receivers = naive_deferred_decide(st.msgs[mid], neighbors, available)
            if receivers is not None:
                out.append((st.store[mid], receivers))
            st.msgs[mid] = slot
        st.msgs = {k: v for k, v in st.msgs.items() if v is not BOTTOM}
        return out

    def pending(self, st) -> bool:
        return bool(st.msgs)

    def digest(self, st):
        return (st.parity, tuple(sorted((k, tuple(sorted(v))) for k, v in st.msgs.items())))


class SynAFIHandler(SynAFHandler):
    """Parity-buffered amnesiac flooding for intermittent channels."""

    name = "synafi"

    def _state(self, st, mid) -> SynAFIState:
        return st.msgs.get(mid) or SynAFIState(parity=st.parity)

    def receive(self, st, sender, m: Message):
        st.store[m.id] = m
        st.msgs[m.id] = synafi_on_receive(self._state(st, m.id), sender)

    def broadcast(self, st, m: Message) -> bool:
        st.store[m.id] = m
        new, accepted = synafi_on_broadcast(self._state(st, m.id))
        st.msgs[m.id] = new
        return accepted

    def snapshot(self, st) -> dict:
        return {mid: s.slot() for mid, s in st.msgs.items() if s.slot() is not BOTTOM}

    def send(self, st, neighbors, available: bool) -> list:
        out = []
        for mid in sorted(st.msgs):
            new, receivers = synafi_decide(st.msgs[mid], neighbors, available)
            st.msgs[mid] = new
            if receivers is not None:
                out.append((st.store[mid], receivers))
        return out

    def end_round(self, st):
        st.parity = not st.parity
        st.msgs = {mid: s.toggled() for mid, s in st.msgs.items() if not s.idle}

    def pending(self, st) -> bool:
        return bool(st.msgs)

    def digest(self, st):
        return (
            st.parity,
            tuple(
                (mid, _key(s.m_true), _key(s.m_false)) for mid, s in sorted(st.msgs.items())
            ),
        )


def _key(slot):
    return None if slot is BOTTOM else tuple(sorted(slot))


class _MultiNode:
    __slots__ = ("state", "receipts", "broadcasts", "selections")

    def __init__(self, state: MultiState):
        self.state = state
        self.receipts: list = []
        self.broadcasts: list = []
        # (message id) per selection, in order; used by fairness checks
        self.selections: list = []


class MultiHandler:
    """Message-table handler with smallest-id or round-robin selection of up to b entries."""

    single_message_state = False

    def __init__(self, policy: str = SMALLEST_ID, capacity_b: int = 1):
        self.policy = policy
        self.capacity_b = capacity_b
        self.name = f"multi:{policy}"

    def new_state(self, node, parity: bool):
        return _MultiNode(MultiState(parity=parity, policy=self.policy, capacity_b=self.capacity_b))

    def receive(self, st, sender, m: Message):
        st.receipts.append((sender, m))

    def broadcast(self, st, m: Message) -> bool:
        entry = st.state.tbl.get(m.id)
        dropped = any(r.id == m.id for _, r in st.receipts) or (
            entry is not None and entry.get(st.state.parity) is not BOTTOM
        )
        st.broadcasts.append(m)
        return not dropped

    def snapshot(self, st) -> dict:
        p = st.state.parity
        snap = {}
        for mid, e in st.state.tbl.items():
            if e.get(p) is not BOTTOM:
                snap[mid] = e.get(p)
        for w, m in st.receipts:
            snap[m.id] = add_sender(snap.get(m.id, BOTTOM), w)
        for m in st.broadcasts:
            snap.setdefault(m.id, frozenset())
        return snap

    def send(self, st, neighbors, available: bool) -> list:
        st.state, sends = messtbl_round(st.state, st.receipts, st.broadcasts, neighbors, available)
        st.receipts, st.broadcasts = [], []
        st.selections.extend(m.id for m, _ in sends)
        return sends

    def end_round(self, st):
        # messtbl_round already toggled parity
        pass

    def pending(self, st) -> bool:
        return bool(st.state.tbl or st.receipts or st.broadcasts)

    def digest(self, st):
        s = st.state
        return (
            s.parity,
            tuple((mid, _key(e.list_true), _key(e.list_false)) for mid, e in sorted(s.tbl.items())),
            s.queue,
        )


def make_handler(name: str, capacity_b: int = 1):
    if name == "synaf":
        return SynAFHandler()
    if name == "naive":
        return NaiveHandler()
    if name == "synafi":
        return SynAFIHandler()
    if name == "multi:smallest":
        return MultiHandler(SMALLEST_ID, capacity_b)
    if name == "multi:fair":
        return MultiHandler(FAIR, capacity_b)
    raise ValueError(f"unknown algorithm {name!r}; expected one of {', '.join(HANDLER_NAMES)}")
