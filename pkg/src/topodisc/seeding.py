"""Seed splitting.

Every random stream in the package is keyed by a master seed plus a tuple of
small integer keys. :func:`derive_seed` hashes that tuple through numpy's
``SeedSequence`` and returns a 64-bit integer, so derived seeds depend only
on their keys, never on the order in which work is scheduled.
"""
from __future__ import annotations

import numpy as np

# Stream tags. Keep these stable: changing one changes every derived seed.
TOPOLOGY = 1
CHANNELS = 2
RUN = 3
SWEEP_PERM = 10
PI_SLOT = 11
USER_STREAM = 12
PAIR = 20
VERIFY = 30

MASK64 = (1 << 64) - 1


def derive_seed(master: int, *keys: int) -> int:
    ss = np.random.SeedSequence(entropy=int(master) & MASK64, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def rng_from_seed(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(int(seed) & MASK64))
