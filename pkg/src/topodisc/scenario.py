"""Random scenario sampling and (de)serialization.

SUs are dropped uniformly in a square and linked when within ``su_range``;
the whole placement is redrawn until the graph is connected. A random set of
common channels is kept away from PUs, the remaining channels are dealt
round-robin to the PUs that cover at least one SU, and each SU loses every
channel held by a PU covering it.
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from . import seeding
from .core import ChannelSet, Scenario, Topology

log = logging.getLogger(__name__)

FORMAT = "topodisc-scenario/1"


class ScenarioGenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ScenarioParams:
    n_channels: int = 256
    n_users: int = 100
    area_side: float = 1000.0
    su_range: float = 250.0
    n_pus: int = 50
    pu_range: float = 500.0
    n_common: int = 4
    max_resample_attempts: int = 10_000

    def __post_init__(self):
        if self.n_users < 1:
            raise ValueError("n_users must be >= 1")
        if not 1 <= self.n_common <= self.n_channels:
            raise ValueError(f"n_common must lie in [1, {self.n_channels}], got {self.n_common}")
        if self.su_range <= 0 or self.pu_range <= 0 or self.area_side <= 0:
            raise ValueError("ranges and area side must be positive")
        if self.n_pus < 0:
            raise ValueError("n_pus must be >= 0")
        if self.max_resample_attempts < 1:
            raise ValueError("max_resample_attempts must be >= 1")


@dataclass(frozen=True)
class Placement:
    su_positions: np.ndarray
    pu_positions: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))


@dataclass(frozen=True)
class Violation:
    detail: str


class ConnectivityViolation(Violation):
    pass


class CommonChannelViolation(Violation):
    pass


def within_range(a: np.ndarray, b: np.ndarray, r: float) -> np.ndarray:
    """Boolean matrix ``|a_i - b_j| <= r`` (closed ball)."""
    a = np.asarray(a, dtype=float).reshape(-1, 2)
    b = np.asarray(b, dtype=float).reshape(-1, 2)
    d2 = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=-1)
    return d2 <= r * r


def topology_from_positions(positions: np.ndarray, su_range: float) -> Topology:
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    near = within_range(positions, positions, su_range)
    iu, ju = np.nonzero(np.triu(near, k=1))
    return Topology(len(positions), zip(iu.tolist(), ju.tolist()))


def generate_topology(params: ScenarioParams, seed: int) -> tuple[Topology, Placement]:
    rng = seeding.rng_from_seed(seed)
    for _ in range(params.max_resample_attempts):
        pos = rng.uniform(0.0, params.area_side, size=(params.n_users, 2))
        topo = topology_from_positions(pos, params.su_range)
        if topo.is_connected():
            return topo, Placement(pos)
    raise ScenarioGenerationError(
        f"no connected placement after {params.max_resample_attempts} attempts "
        f"(K={params.n_users}, range={params.su_range}, side={params.area_side})")


def deal_round_robin(channels: Iterable[int], n_holders: int) -> list[list[int]]:
    """Deal ascending channels to holders ``0..n_holders-1`` in turn."""
    hands: list[list[int]] = [[] for _ in range(n_holders)]
    for i, c in enumerate(sorted(channels)):
        hands[i % n_holders].append(c)
    return hands


def assign_channels(params: ScenarioParams, topology: Topology, placement: Placement,
                    seed: int) -> Scenario:
    """Draw the common set, place PUs and derive every SU's channel set.

    If ``placement.pu_positions`` is non-empty those PUs are used as given and
    ``params.n_pus`` is ignored; otherwise ``n_pus`` PUs are drawn uniformly.
    """
    n = params.n_channels
    if len(placement.su_positions) != topology.n_users:
        raise ValueError("placement does not match topology")
    rng = seeding.rng_from_seed(seed)
    common = np.sort(rng.choice(n, size=params.n_common, replace=False)) + 1
    common_set = ChannelSet(common.tolist(), n)
    pu_channels = [c for c in range(1, n + 1) if c not in common_set]

    pus = np.asarray(placement.pu_positions, dtype=float).reshape(-1, 2)
    if len(pus) == 0:
        pus = rng.uniform(0.0, params.area_side, size=(params.n_pus, 2))
    covers = within_range(pus, placement.su_positions, params.pu_range)
    surviving = np.nonzero(covers.any(axis=1))[0]
    if len(surviving) == 0:
        if pu_channels:
            log.info("no PU covers any SU; every SU keeps all %d channels", n)
        sets = [ChannelSet.full(n)] * topology.n_users
        return Scenario(n, topology, sets, common_set)

    hands = deal_round_robin(pu_channels, len(surviving))
    blocked = [0] * topology.n_users
    for pu, hand in zip(surviving, hands):
        m = ChannelSet(hand, n).mask
        for k in np.nonzero(covers[pu])[0]:
            blocked[k] |= m
    full = ChannelSet.full(n).mask
    sets = [ChannelSet.from_mask(full & ~b, n) for b in blocked]
    return Scenario(n, topology, sets, common_set)


def scenario_seeds(master_seed: int, index: int, n_common: int) -> tuple[int, int]:
    """(topology seed, channel seed) for scenario ``index``.

    The topology seed ignores ``n_common`` so a sweep over common-set sizes
    reuses the same placements.
    """
    return (seeding.derive_seed(master_seed, seeding.TOPOLOGY, index),
            seeding.derive_seed(master_seed, seeding.CHANNELS, n_common, index))


def generate_scenario(params: ScenarioParams, topology_seed: int, channel_seed: int) -> Scenario:
    topo, placement = generate_topology(params, topology_seed)
    s = assign_channels(params, topo, placement, channel_seed)
    return Scenario(s.n_channels, s.topology, s.channel_sets, s.common_set,
                    {"topology": topology_seed, "channels": channel_seed})


def validate_scenario(s: Scenario) -> list[Violation]:
    out: list[Violation] = []
    if not s.topology.is_connected():
        out.append(ConnectivityViolation("topology is not connected"))
    inter = s.channel_sets[0].mask
    for cs in s.channel_sets[1:]:
        inter &= cs.mask
    if inter == 0:
        out.append(CommonChannelViolation("no channel is available to every user"))
    if not s.common_set or s.common_set.mask & ~inter:
        bad = [k for k, cs in enumerate(s.channel_sets) if not s.common_set <= cs]
        out.append(CommonChannelViolation(f"common set not contained in users {bad[:10]}"
                                          if bad else "common set is empty"))
    return out


def realized_intersection(s: Scenario) -> ChannelSet:
    m = s.channel_sets[0].mask
    for cs in s.channel_sets[1:]:
        m &= cs.mask
    return ChannelSet.from_mask(m, s.n_channels)


# -- serialization ---------------------------------------------------------

def scenario_to_dict(s: Scenario) -> dict:
    return {
        "format": FORMAT,
        "n_channels": s.n_channels,
        "n_users": s.n_users,
        "edges": [list(e) for e in s.topology.sorted_edges()],
        "channel_sets": [list(cs.members) for cs in s.channel_sets],
        "common_set": list(s.common_set.members),
        "seeds": {k: int(v) for k, v in sorted(s.seeds.items())},
    }


def scenario_from_dict(d: dict) -> Scenario:
    if d.get("format") != FORMAT:
        raise ValueError(f"unsupported scenario format {d.get('format')!r}")
    n = int(d["n_channels"])
    topo = Topology(int(d["n_users"]), (tuple(e) for e in d["edges"]))
    sets = [ChannelSet(cs, n) for cs in d["channel_sets"]]
    return Scenario(n, topo, sets, ChannelSet(d["common_set"], n), dict(d.get("seeds", {})))


def dumps(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), sort_keys=True, separators=(",", ":"))


def loads(text: str) -> Scenario:
    return scenario_from_dict(json.loads(text))


def write_scenarios(path, scenarios: Iterable[Scenario]) -> None:
    """One JSON object per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in scenarios:
            fh.write(dumps(s) + "\n")


def read_scenarios(path) -> list[Scenario]:
    text = Path(path).read_text(encoding="utf-8")
    return [loads(line) for line in text.splitlines() if line.strip()]


def params_dict(params: ScenarioParams) -> dict:
    return asdict(params)
