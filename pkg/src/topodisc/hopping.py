"""Channel-selection rules.

Each rule maps (available set, slot, shared randomness) to a channel. Slots
passed here are already folded into ``1..N``; the engine handles periodicity.
"""
from __future__ import annotations

import enum
import re
from bisect import bisect_left
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import seeding
from .core import ChannelSet, HopDecision, KnowledgeState


@dataclass(frozen=True, eq=False)
class Permutation:
    """Bijection of ``{1..N}``; ``forward[i - 1] == pi(i)``."""

    forward: np.ndarray
    inverse: np.ndarray

    @classmethod
    def from_forward(cls, forward) -> "Permutation":
        fw = np.asarray(forward, dtype=np.int64)
        n = len(fw)
        if sorted(fw.tolist()) != list(range(1, n + 1)):
            raise ValueError("not a permutation of 1..N")
        inv = np.empty(n, dtype=np.int64)
        inv[fw - 1] = np.arange(1, n + 1)
        fw.setflags(write=False)
        inv.setflags(write=False)
        return cls(fw, inv)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls.from_forward(np.arange(1, n + 1))

    def __len__(self) -> int:
        return len(self.forward)

    def __call__(self, i: int) -> int:
        return int(self.forward[i - 1])

    def inv(self, i: int) -> int:
        return int(self.inverse[i - 1])

    def __eq__(self, other):
        return isinstance(other, Permutation) and np.array_equal(self.forward, other.forward)

    __hash__ = None


def perm_from_seed(seed: int, n: int) -> Permutation:
    """Uniform permutation from numpy's Fisher-Yates shuffle over PCG64."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Permutation.from_forward(seeding.rng_from_seed(seed).permutation(n) + 1)


def sweep_permutation(run_seed: int, n: int) -> Permutation:
    """The single permutation shared by all users in a pseudo-random sweep run."""
    return perm_from_seed(seeding.derive_seed(run_seed, seeding.SWEEP_PERM), n)


def pi_slot_permutation(run_seed: int, t: int, n: int) -> Permutation:
    """Fresh permutation for slot ``t`` of a randomized Pi-algorithm run."""
    return perm_from_seed(seeding.derive_seed(run_seed, seeding.PI_SLOT, t), n)


def user_rng(run_seed: int, user: int) -> np.random.Generator:
    return seeding.rng_from_seed(seeding.derive_seed(run_seed, seeding.USER_STREAM, user))


def forward_pick(c: ChannelSet, target: int, n: int) -> int:
    """Member of ``c`` minimising ``(member - target) mod n``.

    Residues of distinct channels are distinct, so the minimiser is unique:
    the first member at or after ``target`` on the ring.
    """
    ms = c.members
    if not ms:
        raise ValueError("forward_pick on an empty channel set")
    i = bisect_left(ms, target)
    return ms[i] if i < len(ms) else ms[0]


def forward_pick_mask(mask: int, target: int) -> int:
    """:func:`forward_pick` on a channel bitmask."""
    above = mask >> (target - 1)
    if above:
        return target + ((above & -above).bit_length() - 1)
    return (mask & -mask).bit_length()


def sweep_basic(c: ChannelSet, t: int) -> HopDecision:
    return t if t in c else None


def sweep_random_replacement(c: ChannelSet, t: int, rng: np.random.Generator) -> int:
    if t in c:
        return t
    return c.members[int(rng.integers(len(c)))]


def sweep_forward_replacement(c: ChannelSet, t: int, n: int) -> int:
    return forward_pick(c, t, n)


def pi_algorithm(c: ChannelSet, pi_t: Permutation) -> int:
    """Relabel ``c`` through ``pi_t``, take the smallest label, map it back."""
    if not c:
        raise ValueError("pi_algorithm on an empty channel set")
    return pi_t.inv(min(pi_t(ch) for ch in c))


def pseudo_random_sweep(c: ChannelSet, pi: Permutation, t: int, n: int) -> int:
    target = pi(t)
    if target in c:
        return target
    return forward_pick(c, target, n)


def stick_together_set(knowledge: KnowledgeState) -> ChannelSet:
    m = -1
    for cs in knowledge.known_users.values():
        m &= cs.mask
    return ChannelSet.from_mask(m)


def stick_together(c: ChannelSet, knowledge: KnowledgeState, pi: Permutation, t: int, n: int,
                   n_th: int, k_th: int) -> int:
    """Pseudo-random sweep over the known users' common channels once both
    the shared set and the known-user count reach their thresholds."""
    c_st = stick_together_set(knowledge)
    if len(c_st) >= n_th and len(knowledge.known_users) >= k_th:
        return pseudo_random_sweep(c_st, pi, t, n)
    return pseudo_random_sweep(c, pi, t, n)


def random_hop(c: ChannelSet, rng: np.random.Generator) -> int:
    if not c:
        raise ValueError("random_hop on an empty channel set")
    return c.members[int(rng.integers(len(c)))]


class Kind(enum.Enum):
    SWEEP = "sweep"
    SWEEP_RANDOM = "sweep-random"
    SWEEP_FORWARD = "sweep-forward"
    PI = "pi"
    PRS = "prs"
    STICK = "stick"
    RANDOM = "random"


#: Kinds whose schedule repeats every N slots and guarantees TTD <= N.
BOUNDED_KINDS = frozenset({Kind.SWEEP, Kind.SWEEP_RANDOM, Kind.SWEEP_FORWARD, Kind.PRS, Kind.STICK})

LABELS = {
    Kind.SWEEP: "Sweep",
    Kind.SWEEP_RANDOM: "Sweep (random replacement)",
    Kind.SWEEP_FORWARD: "Sweep (forward replacement)",
    Kind.PI: "Pi-algorithm",
    Kind.PRS: "Pseudo-random sweep (basic)",
    Kind.STICK: "Pseudo-random sweep (stick-together)",
    Kind.RANDOM: "Random",
}

_STICK_RE = re.compile(r"^stick:(\d+),(\d+)$")


@dataclass(frozen=True)
class AlgorithmSpec:
    kind: Kind
    n_th: Optional[int] = None
    k_th: Optional[int] = None

    def __post_init__(self):
        if self.kind is Kind.STICK:
            if self.n_th is None or self.k_th is None or self.n_th < 1 or self.k_th < 1:
                raise ValueError("stick-together needs thresholds n_th >= 1 and k_th >= 1")
        elif self.n_th is not None or self.k_th is not None:
            raise ValueError(f"{self.kind.value} takes no thresholds")

    @classmethod
    def parse(cls, text: str) -> "AlgorithmSpec":
        text = text.strip()
        m = _STICK_RE.match(text)
        if m:
            return cls(Kind.STICK, int(m.group(1)), int(m.group(2)))
        try:
            kind = Kind(text)
        except ValueError:
            raise ValueError(f"unknown algorithm {text!r}; expected one of "
                             "sweep, sweep-random, sweep-forward, pi, prs, stick:N,K, random") from None
        if kind is Kind.STICK:
            raise ValueError("stick needs thresholds, e.g. stick:5,30")
        return cls(kind)

    def __str__(self) -> str:
        if self.kind is Kind.STICK:
            return f"stick:{self.n_th},{self.k_th}"
        return self.kind.value

    @property
    def label(self) -> str:
        return LABELS[self.kind]

    @property
    def bounded(self) -> bool:
        return self.kind in BOUNDED_KINDS

    def default_horizon(self, n: int) -> int:
        return n if self.bounded else 16 * n


DEFAULT_ALGORITHMS = tuple(AlgorithmSpec.parse(s) for s in
                           ("sweep", "sweep-random", "sweep-forward", "pi", "prs", "stick:5,30"))
