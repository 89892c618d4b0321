"""Seed derivation shared by the samplers and the experiment harness."""

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def mix_seed(base: int, *indices: int) -> int:
    """Derive a 64-bit child seed from ``base`` and a path of integer indices.

    The result depends only on the arguments, never on scheduling order, so
    trial ``i`` always gets the same stream no matter which worker runs it.
    """
    s = splitmix64(int(base) & _MASK)
    for i in indices:
        s = splitmix64(s ^ (int(i) & _MASK))
    return s


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK))
