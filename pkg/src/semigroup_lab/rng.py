"""Reproducible 64-bit generator for stepsize schedules.

xorshift64* (Vigna 2016): state update ``x ^= x >> 12; x ^= x << 25;
x ^= x >> 27`` and output ``x * 0x2545F4914F6CDD1D mod 2^64``. The seed is
first passed through one splitmix64 round so that seed 0 and nearby seeds
give unrelated, nonzero states. Doubles take the top 53 output bits.

The sequence for a given seed is part of the experiment record; do not change
these constants.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
XORSHIFT_MULT = 0x2545F4914F6CDD1D
SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
SPLITMIX_M1 = 0xBF58476D1CE4E5B9
SPLITMIX_M2 = 0x94D049BB133111EB


def splitmix64(x: int) -> int:
    z = (x + SPLITMIX_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * SPLITMIX_M1) & MASK64
    z = ((z ^ (z >> 27)) * SPLITMIX_M2) & MASK64
    return z ^ (z >> 31)


class XorShift64Star:
    def __init__(self, seed: int):
        state = splitmix64(int(seed) & MASK64)
        self.state = state or SPLITMIX_GAMMA

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * XORSHIFT_MULT) & MASK64

    def random(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform_array(self, size: int) -> np.ndarray:
        return np.fromiter((self.random() for _ in range(size)), dtype=float, count=size)
