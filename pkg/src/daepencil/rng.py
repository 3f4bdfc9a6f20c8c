"""Seeded randomness.

All randomness in the package flows from explicit 64-bit seeds through a
counter-based Philox generator, so results are reproducible and independent
of execution order.
"""

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
