"""Random streams.

Every stochastic routine draws from a :class:`numpy.random.Generator` backed by
the Philox4x64-10 counter-based bit generator, so a seed maps to the same
stream on any platform numpy supports. Seed 0 is valid.
"""

import numpy as np


def make_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        return np.random.Generator(np.random.Philox())
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def spawn_seeds(seed, count):
    """Derive ``count`` independent integer seeds from a master seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1)) for c in children]
