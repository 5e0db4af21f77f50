"""
Correlated trials delay the first success
=========================================

For a stationary two-state chain with success probability p, the expected
first-success time grows with the lag-1 correlation omega. The table
compares the closed form against a direct simulation of 10^5 chains.
"""
from fractions import Fraction

import numpy as np

from topodisc.analytics import (MarkovParams, markov_correlation, markov_expected_T,
                                simulate_first_success)

rng = np.random.default_rng(0)
p = Fraction(1, 4)
print(" omega    p00     E[T]    simulated")
for omega in [Fraction(-1, 3), Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(9, 10)]:
    m = MarkovParams.from_correlation(p, omega)
    assert markov_correlation(m) == omega
    sim = simulate_first_success(m, 100_000, rng).mean()
    print(f"{float(omega):6.2f} {float(m.p00):6.3f} {float(markov_expected_T(m)):8.3f} {sim:10.3f}")
