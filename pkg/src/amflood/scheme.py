"""Availability schemes: the (node, round) pairs in which a node may not send."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable

from .graph import Graph, NodeId


@dataclass(frozen=True)
class AvailabilityScheme:
    """Finite set of blocked ``(node, round)`` pairs; everything else is available."""

    blocked: frozenset = frozenset()

    def __init__(self, blocked: Iterable[tuple[NodeId, int]] = ()):
        pairs = frozenset((v, int(r)) for v, r in blocked)
        for _, r in pairs:
            if r < 1:
                raise ValueError(f"rounds are 1-based, got {r}")
        object.__setattr__(self, "blocked", pairs)

    def is_available(self, v: NodeId, round: int) -> bool:
        return (v, round) not in self.blocked

    @property
    def f(self) -> int:
        return len(self.blocked)

    def last_blocked_round(self) -> int:
        """Largest blocked round, 0 for the empty scheme."""
        return max((r for _, r in self.blocked), default=0)

    def sorted_pairs(self) -> list[tuple]:
        return sorted(self.blocked, key=lambda p: (p[1], p[0]))

    def nodes(self) -> set:
        return {v for v, _ in self.blocked}

    def to_records(self) -> list[dict]:
        return [{"node": v, "round": r} for v, r in self.sorted_pairs()]

    @classmethod
    def from_records(cls, records: Iterable[dict]) -> "AvailabilityScheme":
        return cls((rec["node"], rec["round"]) for rec in records)


EMPTY = AvailabilityScheme()


def is_available(s: AvailabilityScheme, v: NodeId, round: int) -> bool:
    return s.is_available(v, round)


def fault_count(s: AvailabilityScheme) -> int:
    return s.f


def random_scheme(
    g: Graph,
    f: int,
    max_round: int,
    seed: int,
    originator: NodeId | None = None,
    origin_round: int = 1,
) -> AvailabilityScheme:
    """Draw ``f`` distinct blocked pairs with rounds in ``[1, max_round]``.

    When ``originator`` is given, ``(originator, origin_round)`` is never blocked.
    """
    if f < 0 or max_round < 1:
        raise ValueError("need f >= 0 and max_round >= 1")
    eligible = [
        (v, r)
        for r in range(1, max_round + 1)
        for v in g.nodes
        if not (v == originator and r == origin_round)
    ]
    if f > len(eligible):
        raise ValueError(f"f={f} exceeds the {len(eligible)} eligible pairs")
    return AvailabilityScheme(random.Random(seed).sample(eligible, f))
