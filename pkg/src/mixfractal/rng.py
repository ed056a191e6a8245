"""Seed mixing and reproducible Gaussian variates.

Uniforms come from the raw 64-bit output of numpy's PCG64 bit generator,
whose stream is fixed across platforms and numpy releases. Normals are then
produced by the Box-Muller transform implemented here, so the Gaussian
sampling algorithm does not depend on numpy's ``Generator`` methods, which
are allowed to change between releases.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x):
    """SplitMix64 finalizer: a bijective avalanche hash on 64-bit integers."""
    z = x & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed, index):
    """Sub-seed for stream ``index`` of a parent ``seed``.

    Distinct indices always give distinct sub-seeds for the same parent,
    because ``seed + (index + 1) * GOLDEN_GAMMA`` is injective modulo 2**64
    and ``splitmix64`` is a bijection.
    """
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be non-negative")
    return splitmix64(seed + (index + 1) * GOLDEN_GAMMA)


def uniforms(seed, size):
    """``size`` doubles in [0, 1) with 53 random bits each."""
    raw = np.random.PCG64(seed & MASK64).random_raw(size)
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def standard_normals(seed, size):
    """``size`` iid N(0, 1) variates by the Box-Muller transform."""
    pairs = (size + 1) // 2
    u = uniforms(seed, 2 * pairs)
    u1 = 1.0 - u[0::2]  # (0, 1], keeps log finite
    u2 = u[1::2]
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    return z[:size]
