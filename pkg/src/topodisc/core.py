"""Shared vocabulary: channel sets, topologies, scenarios and knowledge states.

Channels are labelled ``1..N``. Users are indexed ``0..K-1``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

Edge = tuple[int, int]

#: A hop decision is the tuned channel, or ``None`` for an idle radio.
HopDecision = Optional[int]


class KnowledgeIntegrityError(ValueError):
    """Two knowledge records disagree about the same user."""


@dataclass(frozen=True)
class ChannelSet:
    """Sorted, duplicate-free set of channel labels.

    Iteration is always ascending. ``mask`` is the same set as an integer
    bitmask with bit ``c - 1`` standing for channel ``c``.
    """

    members: tuple[int, ...]
    n_channels: Optional[int] = field(default=None, compare=False)
    mask: int = field(init=False, repr=False, compare=False)

    def __init__(self, members: Iterable[int] = (), n_channels: Optional[int] = None):
        ms = tuple(sorted({int(c) for c in members}))
        if ms and ms[0] < 1:
            raise ValueError(f"channel labels start at 1, got {ms[0]}")
        if n_channels is not None and ms and ms[-1] > n_channels:
            raise ValueError(f"channel {ms[-1]} exceeds N={n_channels}")
        m = 0
        for c in ms:
            m |= 1 << (c - 1)
        object.__setattr__(self, "members", ms)
        object.__setattr__(self, "n_channels", n_channels)
        object.__setattr__(self, "mask", m)

    @classmethod
    def full(cls, n: int) -> "ChannelSet":
        return cls(range(1, n + 1), n)

    @classmethod
    def from_mask(cls, mask: int, n_channels: Optional[int] = None) -> "ChannelSet":
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length())
            mask ^= low
        return cls(out, n_channels)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, c) -> bool:
        return _has(self.mask, c)

    def __and__(self, other: "ChannelSet") -> "ChannelSet":
        return ChannelSet.from_mask(self.mask & other.mask, self.n_channels)

    def __or__(self, other: "ChannelSet") -> "ChannelSet":
        return ChannelSet.from_mask(self.mask | other.mask, self.n_channels)

    def __sub__(self, other: "ChannelSet") -> "ChannelSet":
        return ChannelSet.from_mask(self.mask & ~other.mask, self.n_channels)

    def __le__(self, other: "ChannelSet") -> bool:
        return self.mask & ~other.mask == 0

    def __ge__(self, other: "ChannelSet") -> bool:
        return other <= self

    def __repr__(self) -> str:
        return "ChannelSet({" + ", ".join(map(str, self.members)) + "})"


def _has(mask: int, c) -> bool:
    try:
        c = int(c)
    except (TypeError, ValueError):
        return False
    return c >= 1 and bool(mask >> (c - 1) & 1)


def _edge(i: int, j: int) -> Edge:
    i, j = int(i), int(j)
    if i == j:
        raise ValueError(f"self-loop on user {i}")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Topology:
    """Undirected simple graph over users ``0..n_users-1``."""

    n_users: int
    edges: frozenset

    def __init__(self, n_users: int, edges: Iterable[tuple[int, int]] = ()):
        es = frozenset(_edge(i, j) for i, j in edges)
        for i, j in es:
            if not (0 <= i < n_users and 0 <= j < n_users):
                raise ValueError(f"edge ({i}, {j}) outside 0..{n_users - 1}")
        object.__setattr__(self, "n_users", int(n_users))
        object.__setattr__(self, "edges", es)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n_users)]
        for i, j in self.sorted_edges():
            adj[i].append(j)
            adj[j].append(i)
        return adj

    def is_connected(self) -> bool:
        if self.n_users <= 1:
            return True
        adj = self.adjacency()
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.n_users


@dataclass(frozen=True)
class Scenario:
    """One sampled world: topology, per-user channel sets, common set.

    The constructor checks shapes only. Assumptions on connectivity and the
    common channel are reported by :func:`topodisc.scenario.validate_scenario`.
    """

    n_channels: int
    topology: Topology
    channel_sets: tuple[ChannelSet, ...]
    common_set: ChannelSet
    seeds: Mapping[str, int] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "channel_sets", tuple(self.channel_sets))
        if len(self.channel_sets) != self.topology.n_users:
            raise ValueError("need one channel set per user")
        for k, cs in enumerate(self.channel_sets):
            if not cs:
                raise ValueError(f"user {k} has no available channel")
            if cs.members[-1] > self.n_channels:
                raise ValueError(f"user {k} holds a channel above N")

    @property
    def n_users(self) -> int:
        return self.topology.n_users


@dataclass(frozen=True)
class KnowledgeState:
    """What one user knows: users with their channel sets, and edges."""

    owner: int
    known_users: Mapping[int, ChannelSet]
    known_edges: frozenset = frozenset()

    def __post_init__(self):
        users = MappingProxyType(dict(sorted(self.known_users.items())))
        object.__setattr__(self, "known_users", users)
        object.__setattr__(self, "known_edges", frozenset(self.known_edges))
        if self.owner not in users:
            raise KnowledgeIntegrityError(f"owner {self.owner} missing from its own knowledge")
        for i, j in self.known_edges:
            if i not in users or j not in users:
                raise KnowledgeIntegrityError(f"edge ({i}, {j}) has an unknown endpoint")

    @classmethod
    def initial(cls, owner: int, channels: ChannelSet) -> "KnowledgeState":
        return cls(owner, {owner: channels})

    def with_owner(self, owner: int) -> "KnowledgeState":
        return KnowledgeState(owner, self.known_users, self.known_edges)

    def __eq__(self, other):
        if not isinstance(other, KnowledgeState):
            return NotImplemented
        return (self.owner == other.owner and dict(self.known_users) == dict(other.known_users)
                and self.known_edges == other.known_edges)

    __hash__ = None


def jaccard(a: ChannelSet, b: ChannelSet) -> Fraction:
    """Exact Jaccard index ``|a & b| / |a | b|``; use ``float()`` for a float view."""
    if not a or not b:
        raise ValueError("jaccard is undefined for an empty channel set")
    inter = (a.mask & b.mask).bit_count()
    union = (a.mask | b.mask).bit_count()
    return Fraction(inter, union)


def intersect_all(sets) -> ChannelSet:
    sets = list(sets)
    if not sets:
        raise ValueError("intersect_all needs at least one set")
    m = sets[0].mask
    for s in sets[1:]:
        m &= s.mask
    return ChannelSet.from_mask(m, sets[0].n_channels)


def merge_knowledge(states, new_edges=()) -> KnowledgeState:
    """Union of several knowledge states plus freshly observed edges.

    The result is owned by the first state's owner; use
    :meth:`KnowledgeState.with_owner` to hand it to the other members.
    """
    states = list(states)
    if not states:
        raise ValueError("merge_knowledge needs at least one state")
    users: dict[int, ChannelSet] = {}
    edges: set[Edge] = set()
    for s in states:
        for u, cs in s.known_users.items():
            prior = users.setdefault(u, cs)
            if prior != cs:
                raise KnowledgeIntegrityError(f"conflicting channel sets for user {u}")
        edges |= s.known_edges
    edges |= {_edge(i, j) for i, j in new_edges}
    return KnowledgeState(states[0].owner, users, edges)


def is_complete(state: KnowledgeState, scenario: Scenario) -> bool:
    if len(state.known_users) != scenario.n_users:
        return False
    for u, cs in state.known_users.items():
        if not (0 <= u < scenario.n_users) or scenario.channel_sets[u] != cs:
            return False
    return state.known_edges == scenario.topology.edges
