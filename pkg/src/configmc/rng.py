"""Seeded random streams.

Every random stream in the package is a PCG64 generator built from
``SeedSequence(seed, spawn_key=path)``.  The *path* names the stream: a
single chain run from the CLI uses ``()``; chain ``k`` of a multi-chain
run uses ``(k,)``; chain ``k`` working on corpus graph ``g`` uses
``(g, k)``, and so on.  Streams with different paths are statistically
independent and the mapping never depends on scheduling order, so
parallel and serial runs produce identical output.
"""

import numpy as np

MAX_SEED = 2**64 - 1


def make_rng(seed, *path):
    """Return the generator for stream ``path`` under master ``seed``."""
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.PCG64(ss))
