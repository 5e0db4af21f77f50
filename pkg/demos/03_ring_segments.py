"""
Why a sequential sweep fails in runs
====================================

Two users' channels cut the N-ring into segments. With forward replacement,
a slot aimed anywhere inside a segment whose end node is shared produces a
rendezvous. A sequential sweep walks the ring in order, so misses come in
runs; a pseudo-random sweep visits the same nodes in shuffled order.
"""
import numpy as np

from topodisc.analytics import SegmentType, pooled_lag1_correlation, ring_decompose
from topodisc.core import ChannelSet
from topodisc.engine import run_pair_indicators
from topodisc.hopping import AlgorithmSpec

n = 16
c1, c2 = ChannelSet({2, 5, 9, 12}, n), ChannelSet({5, 7, 12, 14}, n)
for seg in ring_decompose(c1, c2, n).segments:
    print(f"end {seg.end:2d}  {seg.type.value:10s} nodes {seg.slots(n)}")

for kind in ("sweep-forward", "prs"):
    seq = run_pair_indicators(c1, c2, AlgorithmSpec.parse(kind), n, seed=3, horizon=n)
    print(f"{kind:14s}", "".join("x" if hit else "." for hit in seq))

rng = np.random.default_rng(1)
N = 256
for kind in ("sweep-forward", "prs"):
    seqs = []
    for d in range(200):
        chans = rng.permutation(N)[:28] + 1
        a, b = ChannelSet(list(chans[:16]), N), ChannelSet(list(chans[:4]) + list(chans[16:28]), N)
        seqs.append(run_pair_indicators(a, b, AlgorithmSpec.parse(kind), N, seed=d, horizon=N))
    print(f"pooled lag-1 correlation, {kind}: {pooled_lag1_correlation(seqs):+.3f}")
