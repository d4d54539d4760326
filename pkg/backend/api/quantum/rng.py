"""
Seeded, splittable random streams.

Everything random in api.quantum takes a ``seed`` argument that may be an
int, a ``numpy.random.SeedSequence`` or an existing ``Generator``; there is
no module-global RNG.
"""
from __future__ import annotations

from typing import List, Union

import numpy as np

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]


def make_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        # derive a child sequence from the generator's own stream
        return np.random.SeedSequence(int(seed.integers(0, 2**63 - 1)))
    return np.random.SeedSequence(seed)


def spawn(seed: SeedLike, n: int) -> List[np.random.SeedSequence]:
    """Split ``seed`` into ``n`` independent child streams."""
    return seed_sequence(seed).spawn(n)


def derive_seed(*parts: int) -> int:
    """Stable 63-bit integer seed from a tuple of integers."""
    ss = np.random.SeedSequence(list(parts))
    return int(ss.generate_state(2, dtype=np.uint32).view(np.uint64)[0]
               & np.uint64(2**63 - 1))
