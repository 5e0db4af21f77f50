"""Closed forms and structural analyses used as oracles.

The Markov functions accept floats or :class:`fractions.Fraction` and stay
exact for the latter.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import ChannelSet


@dataclass(frozen=True)
class MarkovParams:
    """Stationary two-state chain fixed by ``p = P(X=1)`` and ``p00``.

    ``p11`` follows from balance, ``p (1 - p11) = (1 - p)(1 - p00)``, and must
    land in ``[0, 1]``.
    """

    p: float
    p00: float

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")
        if not 0 <= self.p00 <= 1:
            raise ValueError(f"p00 must lie in [0, 1], got {self.p00}")
        if not 0 <= self.p11 <= 1:
            raise ValueError(f"no stationary chain with p={self.p}, p00={self.p00} (p11={self.p11})")

    @property
    def p11(self):
        return 1 - (1 - self.p) * (1 - self.p00) / self.p

    @classmethod
    def from_correlation(cls, p, omega) -> "MarkovParams":
        return cls(p, (1 - p) + omega * p)

    @staticmethod
    def p00_range(p):
        """Smallest admissible ``p00`` for a given ``p`` (the largest is 1)."""
        return max(0, 1 - p / (1 - p))


def markov_tail(params: MarkovParams, t: int):
    """``P(T > t)`` for the first success time ``T``."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return 1
    return (1 - params.p) * params.p00 ** (t - 1)


def markov_expected_T(params: MarkovParams):
    if params.p00 == 1:
        raise ZeroDivisionError("E[T] diverges when p00 = 1")
    return 1 + (1 - params.p) / (1 - params.p00)


def markov_correlation(params: MarkovParams):
    """Lag-1 correlation ``(p00 - (1 - p)) / p``."""
    return (params.p00 - (1 - params.p)) / params.p


def simulate_first_success(params: MarkovParams, n_chains: int, rng: np.random.Generator,
                           max_steps: int = 1_000_000) -> np.ndarray:
    """Run ``n_chains`` independent chains slot by slot and return each one's
    first success time. Chains start from the stationary law."""
    p, p00 = float(params.p), float(params.p00)
    T = np.zeros(n_chains, dtype=np.int64)
    x1 = rng.random(n_chains) < p
    T[x1] = 1
    alive = np.nonzero(~x1)[0]
    t = 1
    while len(alive) and t < max_steps:
        t += 1
        # from state 0 the chain moves to 1 with probability 1 - p00
        hit = rng.random(len(alive)) >= p00
        T[alive[hit]] = t
        alive = alive[~hit]
    if len(alive):
        raise RuntimeError(f"{len(alive)} chains still failing after {max_steps} steps")
    return T


def empirical_lag1_correlation(x: Sequence[bool]) -> float:
    """Pearson correlation of consecutive pairs with a pooled mean.
    ``nan`` when the sequence is constant."""
    if len(x) < 3:
        raise ValueError("need at least 3 observations")
    return pooled_lag1_correlation([x])


def lag1_sums(x) -> tuple[float, float, float, float, float, int]:
    """Sufficient statistics of the consecutive pairs ``(x_t, x_{t+1})``:
    sums of a, b, a*b, a*a, b*b and the pair count."""
    v = np.asarray(x, dtype=float)
    a, b = v[:-1], v[1:]
    return a.sum(), b.sum(), (a * b).sum(), (a * a).sum(), (b * b).sum(), len(a)


def correlation_from_sums(sa, sb, sab, saa, sbb, m) -> float:
    mean = (sa + sb) / (2 * m)
    cov = sab - mean * (sa + sb) + m * mean * mean
    va = saa - 2 * mean * sa + m * mean * mean
    vb = sbb - 2 * mean * sb + m * mean * mean
    den = math.sqrt(va * vb) if va > 0 and vb > 0 else 0.0
    if den <= 1e-12 * max(m, 1):
        return math.nan
    return cov / den


def pooled_lag1_correlation(sequences) -> float:
    """Lag-1 correlation with pairs pooled across sequences (pairs never
    straddle two sequences)."""
    tot = np.zeros(6)
    for s in sequences:
        if len(s) >= 2:
            tot += lag1_sums(s)
    return correlation_from_sums(*tot)


class SegmentType(enum.Enum):
    RENDEZVOUS = "rendezvous"
    TYPE1 = "type1"
    TYPE2 = "type2"


@dataclass(frozen=True)
class Segment:
    end: int
    type: SegmentType
    length: int

    def slots(self, n: int) -> list[int]:
        """Ring nodes covered, ending at ``end``."""
        return [(self.end - i - 1) % n + 1 for i in range(self.length)][::-1]


@dataclass(frozen=True)
class RingDecomposition:
    n: int
    segments: tuple[Segment, ...]

    def count(self, kind: SegmentType) -> int:
        return sum(s.type is kind for s in self.segments)

    def segment_at(self, node: int) -> Segment:
        for s in self.segments:
            if node in s.slots(self.n):
                return s
        raise ValueError(f"node {node} not on the ring")


def ring_decompose(c1: ChannelSet, c2: ChannelSet, n: int) -> RingDecomposition:
    """Cut the ring ``1..n`` at every channel held by either user.

    Each segment runs from just after one cut node up to and including the
    next, and is typed by that end node.
    """
    colored = []
    for node in range(1, n + 1):
        in1, in2 = node in c1, node in c2
        if in1 and in2:
            colored.append((node, SegmentType.RENDEZVOUS))
        elif in1:
            colored.append((node, SegmentType.TYPE1))
        elif in2:
            colored.append((node, SegmentType.TYPE2))
    if not colored:
        raise ValueError("both channel sets are empty")
    segs = []
    for i, (node, kind) in enumerate(colored):
        prev = colored[i - 1][0]
        length = (node - prev) % n or n
        segs.append(Segment(node, kind, length))
    return RingDecomposition(n, tuple(segs))


def ettr_oracle_random(n1: int, n2: int, n12: int) -> Fraction:
    """Expected meeting time of two users hopping uniformly at random."""
    if n12 == 0:
        raise ZeroDivisionError("no common channel: ETTR diverges")
    if not 1 <= n12 <= min(n1, n2):
        raise ValueError("need 1 <= n12 <= min(n1, n2)")
    return Fraction(n1 * n2, n12)


def ettr_oracle_pi(c1: ChannelSet, c2: ChannelSet) -> Fraction:
    """Inverse Jaccard index of the two sets."""
    inter = (c1.mask & c2.mask).bit_count()
    if inter == 0:
        raise ZeroDivisionError("no common channel: ETTR diverges")
    return Fraction((c1.mask | c2.mask).bit_count(), inter)
