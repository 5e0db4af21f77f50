import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from topodisc.analytics import (MarkovParams, SegmentType, empirical_lag1_correlation,
                                ettr_oracle_pi, ettr_oracle_random, markov_correlation,
                                markov_expected_T, markov_tail, pooled_lag1_correlation,
                                ring_decompose, simulate_first_success)
from topodisc.core import ChannelSet


def test_markov_params_validation():
    with pytest.raises(ValueError):
        MarkovParams(0, 0.5)
    with pytest.raises(ValueError):
        MarkovParams(0.1, 0.5)          # p11 would be negative
    m = MarkovParams(Fraction(1, 4), Fraction(9, 10))
    assert m.p11 == Fraction(7, 10)


def test_markov_tail():
    assert markov_tail(MarkovParams(0.5, 0.5), 1) == 0.5
    assert markov_tail(MarkovParams(0.5, 0.5), 0) == 1
    assert markov_tail(MarkovParams(0.5, 0), 2) == 0


def test_markov_tail_matches_path_enumeration():
    # P(T > t) as the probability of the all-failure path, by explicit products
    m = MarkovParams(Fraction(1, 4), Fraction(9, 10))
    prob = 1 - m.p
    for t in range(1, 8):
        assert markov_tail(m, t) == prob
        prob *= m.p00


def test_expected_T_examples():
    assert markov_expected_T(MarkovParams(0.5, 0.5)) == 2
    assert markov_expected_T(MarkovParams(Fraction(1, 4), Fraction(9, 10))) == Fraction(17, 2)
    assert markov_expected_T(MarkovParams(Fraction(1, 4), Fraction(3, 4))) == 4
    with pytest.raises(ZeroDivisionError):
        markov_expected_T(MarkovParams(0.5, 1))


def test_expected_T_monte_carlo():
    m = MarkovParams(0.25, 0.9)
    T = simulate_first_success(m, 1_000_000, np.random.default_rng(1))
    assert abs(T.mean() / 8.5 - 1) < 0.01


@pytest.mark.parametrize("p, p00", [(Fraction(1, 4), Fraction(9, 10)), (Fraction(1, 10), Fraction(95, 100)),
                                    (Fraction(1, 2), Fraction(1, 5))])
def test_tail_sum_identity(p, p00):
    m = MarkovParams(p, p00)
    big = 200
    partial = sum(Fraction(markov_tail(m, t)) for t in range(big + 1))
    remainder = (1 - p) * p00 ** big / (1 - p00)
    total = partial + remainder
    assert abs(total / markov_expected_T(m) - 1) < 1e-12


def test_correlation_examples():
    assert markov_correlation(MarkovParams(Fraction(1, 3), Fraction(2, 3))) == 0
    assert markov_correlation(MarkovParams(Fraction(1, 4), Fraction(9, 10))) == Fraction(3, 5)
    assert markov_correlation(MarkovParams(0.5, 1.0)) == 1.0


def test_correlation_matches_simulated_chain():
    m = MarkovParams(0.25, 0.9)
    rng = np.random.default_rng(3)
    n = 400_000
    x = np.empty(n, dtype=bool)
    x[0] = rng.random() < m.p
    u = rng.random(n)
    for t in range(1, n):
        x[t] = u[t] < (m.p11 if x[t - 1] else 1 - m.p00)
    assert abs(empirical_lag1_correlation(x) - 0.6) < 0.02


@given(st.fractions(min_value=Fraction(1, 20), max_value=Fraction(19, 20)),
       st.lists(st.fractions(min_value=0, max_value=1), min_size=2, max_size=6, unique=True))
def test_expected_T_increases_with_correlation(p, raw):
    lo = Fraction(MarkovParams.p00_range(p))
    grid = sorted(lo + (Fraction(99, 100) - lo) * r for r in raw)
    ms = [MarkovParams(p, q) for q in grid]
    omegas = [markov_correlation(m) for m in ms]
    ets = [markov_expected_T(m) for m in ms]
    assert omegas == sorted(set(omegas)) and ets == sorted(set(ets))


def test_independent_chain_gives_geometric_mean():
    for p in (Fraction(1, 10), Fraction(1, 3)):
        m = MarkovParams(p, 1 - p)
        assert markov_correlation(m) == 0 and markov_expected_T(m) == 1 / p


def test_empirical_lag1():
    assert empirical_lag1_correlation([0, 1] * 10) == pytest.approx(-1)
    assert math.isnan(empirical_lag1_correlation([1] * 10))
    with pytest.raises(ValueError):
        empirical_lag1_correlation([0, 1])
    x = np.random.default_rng(0).random(1_000_000) < 0.5
    assert abs(empirical_lag1_correlation(x)) < 0.01


def test_pooled_does_not_bridge_sequences():
    # each sequence alone is perfectly anti-correlated; joining them would add a (1, 1) pair
    assert pooled_lag1_correlation([[0, 1, 0, 1], [1, 0, 1, 0]]) == pytest.approx(-1)


def test_ring_decompose_examples():
    n = 6
    full = ChannelSet.full(n)
    d = ring_decompose(full, full, n)
    assert len(d.segments) == n and all(s.length == 1 and s.type is SegmentType.RENDEZVOUS for s in d.segments)
    d = ring_decompose(ChannelSet({1, 4}, n), ChannelSet({1, 5}, n), n)
    assert [(s.end, s.type, s.length) for s in d.segments] == [
        (1, SegmentType.RENDEZVOUS, 2), (4, SegmentType.TYPE1, 3), (5, SegmentType.TYPE2, 1)]
    assert d.segment_at(6).end == 1 and d.segment_at(2).end == 4


@given(st.integers(2, 12).flatmap(lambda n: st.tuples(
    st.just(n), st.frozensets(st.integers(1, n), min_size=1), st.frozensets(st.integers(1, n), min_size=1))))
def test_ring_decompose_counts(args):
    n, a, b = args
    c1, c2 = ChannelSet(a, n), ChannelSet(b, n)
    d = ring_decompose(c1, c2, n)
    assert len(d.segments) == len(a) + len(b) - len(a & b)
    assert d.count(SegmentType.RENDEZVOUS) == len(a & b)
    assert d.count(SegmentType.TYPE1) == len(a - b)
    assert sum(s.length for s in d.segments) == n
    covered = sorted(x for s in d.segments for x in s.slots(n))
    assert covered == list(range(1, n + 1))


def test_ettr_oracles():
    assert ettr_oracle_random(5, 5, 5) == 5
    assert ettr_oracle_random(8, 8, 4) == 16
    assert ettr_oracle_random(2, 3, 1) == 6
    with pytest.raises(ZeroDivisionError):
        ettr_oracle_random(2, 3, 0)
    c = ChannelSet({1, 2, 3})
    assert ettr_oracle_pi(c, c) == 1
    assert ettr_oracle_pi(ChannelSet({1, 2}), ChannelSet({2, 3})) == 3
    assert ettr_oracle_pi(ChannelSet(range(1, 9)), ChannelSet(range(5, 13))) == 3
    with pytest.raises(ZeroDivisionError):
        ettr_oracle_pi(ChannelSet({1}), ChannelSet({2}))
