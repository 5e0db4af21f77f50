"""Numerical verification suites behind ``topodisc verify``.

Each suite returns a list of :class:`Check`; sizes are parameters so the
unit tests can run reduced versions.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import seeding
from .analytics import (MarkovParams, SegmentType, ettr_oracle_pi, ettr_oracle_random,
                        lag1_sums, correlation_from_sums, markov_correlation, markov_expected_T,
                        ring_decompose, simulate_first_success)
from .core import ChannelSet
from .engine import pair_ttr, run_pair_indicators
from .hopping import AlgorithmSpec, Kind, sweep_forward_replacement


@dataclass
class Check:
    name: str
    passed: bool
    observed: Any
    expected: Any

    def line(self) -> str:
        return json.dumps({"check": self.name, "pass": bool(self.passed),
                           "observed": self.observed, "expected": self.expected}, default=str)


def markov_grid(p: Fraction, n_points: int = 20) -> list[MarkovParams]:
    """Evenly spaced admissible ``p00`` values, strictly below 1."""
    lo = Fraction(MarkovParams.p00_range(p))
    hi = Fraction(99, 100)
    step = (hi - lo) / (n_points - 1)
    return [MarkovParams(p, lo + i * step) for i in range(n_points)]


def theorem_suite(ps=(Fraction(1, 10), Fraction(1, 4), Fraction(1, 2)), n_points: int = 20,
                  n_chains: int = 1_000_000, rel_tol: float = 0.01, seed: int = 1) -> list[Check]:
    checks = []
    rng = seeding.rng_from_seed(seeding.derive_seed(seed, seeding.VERIFY, 1))
    for p in ps:
        grid = markov_grid(p, n_points)
        pairs = sorted((markov_correlation(m), markov_expected_T(m)) for m in grid)
        increasing = all(b[0] > a[0] and b[1] > a[1] for a, b in zip(pairs, pairs[1:]))
        checks.append(Check(f"theorem/monotone/p={p}", increasing,
                            [float(e) for _, e in pairs], "strictly increasing in omega"))
        worst = 0.0
        for m in grid:
            mc = simulate_first_success(m, n_chains, rng).mean()
            worst = max(worst, abs(mc / float(markov_expected_T(m)) - 1))
        checks.append(Check(f"theorem/monte-carlo/p={p}", worst <= rel_tol, worst, f"<= {rel_tol}"))
    return checks


def random_pair_sets(rng: np.random.Generator, n: int, n1: int, n2: int, n12: int):
    chans = rng.permutation(n)[: n1 + n2 - n12] + 1
    common = chans[:n12]
    c1 = ChannelSet(np.concatenate([common, chans[n12:n1]]).tolist(), n)
    c2 = ChannelSet(np.concatenate([common, chans[n1:n1 + n2 - n12]]).tolist(), n)
    return c1, c2


def mean_pair_ttr(kind: str, n: int = 64, n1: int = 8, n2: int = 8, n12: int = 4,
                  runs: int = 100_000, seed: int = 2) -> float:
    alg = AlgorithmSpec.parse(kind)
    rng = seeding.rng_from_seed(seeding.derive_seed(seed, seeding.VERIFY, 2))
    total = 0
    for r in range(runs):
        c1, c2 = random_pair_sets(rng, n, n1, n2, n12)
        t = pair_ttr(c1, c2, alg, n, seeding.derive_seed(seed, seeding.PAIR, r), 1 << 20)
        total += t
    return total / runs


def oracles_suite(runs: int = 100_000, rel_tol: float = 0.03, seed: int = 2) -> list[Check]:
    n, n1, n2, n12 = 64, 8, 8, 4
    c1 = ChannelSet(range(1, 9), n)
    c2 = ChannelSet(range(5, 13), n)
    checks = []
    for kind, expected in (("pi", ettr_oracle_pi(c1, c2)), ("random", ettr_oracle_random(n1, n2, n12))):
        mean = mean_pair_ttr(kind, n, n1, n2, n12, runs, seed)
        err = abs(mean / float(expected) - 1)
        checks.append(Check(f"oracles/{kind}", err <= rel_tol, mean, f"{float(expected)} +/- {rel_tol:.0%}"))
    return checks


def subsets(n: int):
    for mask in range(1, 1 << n):
        yield ChannelSet.from_mask(mask, n)


def decomposition_suite(n: int = 8) -> list[Check]:
    alg = AlgorithmSpec(Kind.SWEEP_FORWARD)
    all_sets = list(subsets(n))
    bad_counts, bad_slots, pairs = 0, 0, 0
    for c1 in all_sets:
        for c2 in all_sets:
            inter = c1.mask & c2.mask
            if not inter:
                continue
            pairs += 1
            dec = ring_decompose(c1, c2, n)
            n1, n2, n12 = len(c1), len(c2), inter.bit_count()
            if len(dec.segments) != n1 + n2 - n12 or dec.count(SegmentType.RENDEZVOUS) != n12 \
                    or sum(s.length for s in dec.segments) != n:
                bad_counts += 1
            rendezvous_slots = set()
            for s in dec.segments:
                if s.type is SegmentType.RENDEZVOUS:
                    rendezvous_slots.update(s.slots(n))
            met = [sweep_forward_replacement(c1, t, n) == sweep_forward_replacement(c2, t, n)
                   for t in range(1, n + 1)]
            if met != [t in rendezvous_slots for t in range(1, n + 1)]:
                bad_slots += 1
    return [Check(f"decomposition/counts/N={n}", bad_counts == 0, bad_counts, f"0 of {pairs} pairs"),
            Check(f"decomposition/slots/N={n}", bad_slots == 0, bad_slots, f"0 of {pairs} pairs")]


def pair_indicator_sequences(kind: str, draws: int, n: int, n1: int, n2: int, n12: int,
                             seed: int) -> list[list[bool]]:
    alg = AlgorithmSpec.parse(kind)
    rng = seeding.rng_from_seed(seeding.derive_seed(seed, seeding.VERIFY, 8))
    out = []
    for d in range(draws):
        c1, c2 = random_pair_sets(rng, n, n1, n2, n12)
        out.append(run_pair_indicators(c1, c2, alg, n, seeding.derive_seed(seed, seeding.PAIR, d), n))
    return out


def bootstrap_pooled_correlation(seqs, n_boot: int, rng: np.random.Generator) -> np.ndarray:
    """Resample whole sequences; returns the bootstrap distribution."""
    sums = np.array([lag1_sums(s) for s in seqs])
    idx = rng.integers(0, len(seqs), size=(n_boot, len(seqs)))
    tot = sums[idx].sum(axis=1)
    return np.array([correlation_from_sums(*row) for row in tot])


def correlation_suite(draws: int = 500, n: int = 256, n1: int = 16, n2: int = 16, n12: int = 4,
                      n_boot: int = 2000, prs_bound: float = 0.05, seed: int = 8) -> list[Check]:
    rng = seeding.rng_from_seed(seeding.derive_seed(seed, seeding.VERIFY, 9))
    seq = pair_indicator_sequences("sweep-forward", draws, n, n1, n2, n12, seed)
    prs = pair_indicator_sequences("prs", draws, n, n1, n2, n12, seed)
    r_seq = correlation_from_sums(*np.sum([lag1_sums(s) for s in seq], axis=0))
    r_prs = correlation_from_sums(*np.sum([lag1_sums(s) for s in prs], axis=0))
    lo = float(np.quantile(bootstrap_pooled_correlation(seq, n_boot, rng), 0.01))
    return [Check("correlation/sweep-forward", lo > 0, {"r": r_seq, "lower99": lo}, "lower99 > 0"),
            Check("correlation/prs", abs(r_prs) < prs_bound, r_prs, f"|r| < {prs_bound}")]


SUITES: dict[str, Callable[[], list[Check]]] = {
    "theorem": theorem_suite,
    "oracles": oracles_suite,
    "decomposition": decomposition_suite,
    "correlation": correlation_suite,
}
