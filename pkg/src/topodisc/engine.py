"""Slot-synchronous discovery runs.

:func:`step` is the direct reading of the knowledge-exchange rule on
:class:`~topodisc.core.KnowledgeState` values. :class:`Simulation` runs the
same rule on integer bitmasks (known users, known edges, and the running
intersection of known users' channels) and is what :func:`run_discovery`
uses; the tests check the two agree slot by slot.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import ChannelSet, HopDecision, KnowledgeState, Scenario, Topology, merge_knowledge
from .hopping import (AlgorithmSpec, Kind, forward_pick_mask, pi_slot_permutation, random_hop,
                      sweep_permutation, sweep_random_replacement, user_rng)
from .scenario import validate_scenario


def connected_components(topology: Topology, subset) -> list[list[int]]:
    """Components of the subgraph induced by ``subset``, each sorted,
    listed by ascending smallest member."""
    subset = set(subset)
    adj = topology.adjacency()
    seen: set[int] = set()
    out = []
    for s in sorted(subset):
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        stack = [s]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v in subset and v not in seen:
                    seen.add(v)
                    comp.append(v)
                    stack.append(v)
        out.append(sorted(comp))
    return out


def step(scenario: Scenario, states: Sequence[KnowledgeState],
         decisions: Sequence[HopDecision]) -> list[KnowledgeState]:
    topo = scenario.topology
    new = list(states)
    by_channel: dict[int, list[int]] = {}
    for k, d in enumerate(decisions):
        if d is not None:
            by_channel.setdefault(d, []).append(k)
    for ch in sorted(by_channel):
        for comp in connected_components(topo, by_channel[ch]):
            if len(comp) == 1:
                continue
            members = set(comp)
            induced = [e for e in topo.edges if e[0] in members and e[1] in members]
            merged = merge_knowledge([states[k] for k in comp], induced)
            for k in comp:
                new[k] = merged.with_owner(k)
    return new


@dataclass(frozen=True)
class EngineConfig:
    algorithm: AlgorithmSpec
    run_seed: int = 0
    t_max: Optional[int] = None

    def horizon(self, n: int) -> int:
        t = self.algorithm.default_horizon(n) if self.t_max is None else self.t_max
        if t < 1:
            raise ValueError("t_max must be >= 1")
        return t


@dataclass
class RunResult:
    """Outcome of one run. ``ttd``/``ttr`` are ``None`` when censored at ``t_max``."""

    ttd: Optional[int]
    ttr: Optional[int]
    t_max: int
    slots_executed: int
    per_slot_coincidence: list[bool] = field(default_factory=list, repr=False)

    @property
    def censored(self) -> bool:
        return self.ttd is None

    @property
    def ttr_censored(self) -> bool:
        return self.ttr is None


class Simulation:
    """Mutable per-run state on bitmasks.

    Bit ``k`` of ``users[u]`` means user ``u`` knows user ``k``; bit ``e`` of
    ``edges[u]`` refers to ``edge_list[e]``; ``shared[u]`` is the channel mask
    common to every user ``u`` knows.
    """

    def __init__(self, channel_sets: Sequence[ChannelSet], topology: Topology, n_channels: int,
                 algorithm: AlgorithmSpec, run_seed: int = 0):
        self.n = n_channels
        self.k = len(channel_sets)
        self.channel_sets = list(channel_sets)
        self.algorithm = algorithm
        self.run_seed = run_seed
        self.edge_list = topology.sorted_edges()
        e = np.array(self.edge_list, dtype=np.int64).reshape(-1, 2)
        self._eu, self._ev = e[:, 0], e[:, 1]
        self.users = [1 << u for u in range(self.k)]
        self.edges = [0] * self.k
        self.shared = [cs.mask for cs in self.channel_sets]
        self._full_users = (1 << self.k) - 1
        self._full_edges = (1 << len(self.edge_list)) - 1
        self.complete = [self._is_full(u) for u in range(self.k)]
        self.n_complete = sum(self.complete)
        self._setup(algorithm.kind)

    def _setup(self, kind: Kind) -> None:
        n, k = self.n, self.k
        if kind in (Kind.SWEEP, Kind.PI):
            self._avail = np.zeros((k, n), dtype=bool)
            for u, cs in enumerate(self.channel_sets):
                self._avail[u, np.array(cs.members) - 1] = True
        if kind in (Kind.SWEEP_FORWARD, Kind.PRS, Kind.STICK):
            targets = np.arange(1, n + 1)
            self._next = np.empty((k, n), dtype=np.int64)
            for u, cs in enumerate(self.channel_sets):
                ms = np.array(cs.members)
                idx = np.searchsorted(ms, targets)
                self._next[u] = ms[np.where(idx < len(ms), idx, 0)]
        if kind in (Kind.PRS, Kind.STICK):
            self._perm = sweep_permutation(self.run_seed, n)
        if kind in (Kind.SWEEP_RANDOM, Kind.RANDOM):
            self._rngs = [user_rng(self.run_seed, u) for u in range(k)]

    def _is_full(self, u: int) -> bool:
        return self.users[u] == self._full_users and self.edges[u] == self._full_edges

    def fold(self, t: int) -> int:
        return (t - 1) % self.n + 1

    def decisions(self, t: int) -> np.ndarray:
        """Channels tuned at slot ``t``; 0 marks an idle user."""
        kind = self.algorithm.kind
        if kind is Kind.SWEEP:
            s = self.fold(t)
            return np.where(self._avail[:, s - 1], s, 0)
        if kind is Kind.SWEEP_FORWARD:
            return self._next[:, self.fold(t) - 1].copy()
        if kind is Kind.PRS:
            return self._next[:, self._perm(self.fold(t)) - 1].copy()
        if kind is Kind.STICK:
            target = self._perm(self.fold(t))
            dec = self._next[:, target - 1].copy()
            n_th, k_th = self.algorithm.n_th, self.algorithm.k_th
            for u in range(self.k):
                if self.users[u].bit_count() >= k_th and self.shared[u].bit_count() >= n_th:
                    dec[u] = forward_pick_mask(self.shared[u], target)
            return dec
        if kind is Kind.PI:
            pi_t = pi_slot_permutation(self.run_seed, t, self.n)
            ranks = np.where(self._avail, pi_t.forward[None, :], self.n + 1)
            return ranks.argmin(axis=1) + 1
        if kind is Kind.SWEEP_RANDOM:
            s = self.fold(t)
            return np.array([sweep_random_replacement(cs, s, rng)
                             for cs, rng in zip(self.channel_sets, self._rngs)], dtype=np.int64)
        if kind is Kind.RANDOM:
            return np.array([random_hop(cs, rng) for cs, rng in zip(self.channel_sets, self._rngs)],
                            dtype=np.int64)
        raise AssertionError(kind)

    def apply(self, dec: np.ndarray) -> None:
        """Merge knowledge inside every co-channel connected group."""
        if len(self.edge_list) == 0:
            return
        du, dv = dec[self._eu], dec[self._ev]
        sel = np.nonzero((du == dv) & (du != 0))[0]
        if len(sel) == 0:
            return
        parent: dict[int, int] = {}

        def find(x):
            root = x
            while parent.setdefault(root, root) != root:
                root = parent[root]
            while parent[x] != root:
                parent[x], x = root, parent[x]
            return root

        for e in sel.tolist():
            a, b = find(int(self._eu[e])), find(int(self._ev[e]))
            if a != b:
                parent[max(a, b)] = min(a, b)
        groups: dict[int, list[int]] = {}
        for x in list(parent):
            groups.setdefault(find(x), []).append(x)
        fresh: dict[int, int] = {}
        for e in sel.tolist():
            r = find(int(self._eu[e]))
            fresh[r] = fresh.get(r, 0) | (1 << e)
        for root, members in groups.items():
            users, edges, shared = 0, fresh[root], -1
            for u in members:
                users |= self.users[u]
                edges |= self.edges[u]
                shared &= self.shared[u]
            done = users == self._full_users and edges == self._full_edges
            for u in members:
                self.users[u], self.edges[u], self.shared[u] = users, edges, shared
                if done and not self.complete[u]:
                    self.complete[u] = True
                    self.n_complete += 1

    @property
    def all_complete(self) -> bool:
        return self.n_complete == self.k

    def knowledge(self, u: int) -> KnowledgeState:
        known = {}
        m = self.users[u]
        while m:
            low = m & -m
            v = low.bit_length() - 1
            known[v] = self.channel_sets[v]
            m ^= low
        edges = [self.edge_list[i] for i in range(len(self.edge_list)) if self.edges[u] >> i & 1]
        return KnowledgeState(u, known, edges)


def _run(sim: Simulation, horizon: int, *, record: bool = True) -> RunResult:
    ttd = 0 if sim.all_complete else None
    ttr = None
    coincidence: list[bool] = []
    t = 0
    while t < horizon and (ttd is None or ttr is None):
        t += 1
        dec = sim.decisions(t)
        hit = bool(dec[0] != 0 and (dec == dec[0]).all())
        if record:
            coincidence.append(hit)
        if hit and ttr is None:
            ttr = t
        sim.apply(dec)
        if ttd is None and sim.all_complete:
            ttd = t
    return RunResult(ttd, ttr, horizon, t, coincidence)


def run_discovery(scenario: Scenario, config: EngineConfig) -> RunResult:
    """Run until every user holds the full topology and all users have once
    shared a channel, or until the horizon. Continuing past discovery lets
    TTR be observed as well."""
    problems = validate_scenario(scenario)
    if problems:
        raise ValueError(f"invalid scenario: {problems}")
    sim = Simulation(scenario.channel_sets, scenario.topology, scenario.n_channels,
                     config.algorithm, config.run_seed)
    return _run(sim, config.horizon(scenario.n_channels))


def _pair(c1: ChannelSet, c2: ChannelSet, algorithm: AlgorithmSpec, n: int, seed: int) -> Simulation:
    if not c1 or not c2:
        raise ValueError("both channel sets must be non-empty")
    return Simulation([c1, c2], Topology(2, [(0, 1)]), n, algorithm, seed)


def run_pair_indicators(c1: ChannelSet, c2: ChannelSet, algorithm: AlgorithmSpec, n: int,
                        seed: int, horizon: int) -> list[bool]:
    """Whether two adjacent users share a channel at each of ``horizon`` slots."""
    sim = _pair(c1, c2, algorithm, n, seed)
    out = []
    for t in range(1, horizon + 1):
        dec = sim.decisions(t)
        out.append(bool(dec[0] != 0 and dec[0] == dec[1]))
        sim.apply(dec)
    return out


def pair_ttr(c1: ChannelSet, c2: ChannelSet, algorithm: AlgorithmSpec, n: int, seed: int,
             horizon: int) -> Optional[int]:
    """First slot at which two adjacent users meet, or ``None`` within ``horizon``."""
    sim = _pair(c1, c2, algorithm, n, seed)
    for t in range(1, horizon + 1):
        dec = sim.decisions(t)
        if dec[0] != 0 and dec[0] == dec[1]:
            return t
        sim.apply(dec)
    return None
