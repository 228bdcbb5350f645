"""Seed-expanded deterministic random streams.

Both endpoints must derive bit-identical measurement matrices from a shared
64-bit seed, so every stage is pinned: splitmix64 expands the seed into the
four-word xoshiro256++ state, uniforms take the top 53 bits of each output
word, and normal deviates come from Box-Muller pairs consumed in order.

xoshiro256++ is a reproducibility contract, not a security primitive; the
secrecy analysis of the cipher never relies on this stream being
unpredictable.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_TWO_PI = 2.0 * math.pi
_U53 = 2.0**-53  # spacing of the 53-bit uniform grid


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state by one step; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256pp:
    """xoshiro256++ seeded by splitmix64 expansion of a 64-bit seed."""

    def __init__(self, seed: int):
        if not 0 <= seed <= _MASK64:
            raise ValueError("seed must fit in 64 unsigned bits")
        state = []
        s = seed
        for _ in range(4):
            s, word = splitmix64_next(s)
            state.append(word)
        self._s = state

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s0 + s3) & _MASK64, 23) + s0) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def next_double(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits of the next word."""
        return (self.next_u64() >> 11) * _U53


class GaussianStream:
    """Standard-normal stream in pinned Box-Muller pair order.

    Each pair of uniforms (u1, u2) yields (r cos(2 pi u2), r sin(2 pi u2))
    with r = sqrt(-2 ln u1), consumed cosine first.  A draw of odd length
    discards the trailing sine deviate; nothing is cached between draws.
    """

    def __init__(self, seed: int):
        self._rng = Xoshiro256pp(seed)

    def next_pair(self) -> tuple[float, float]:
        u1 = self._rng.next_double()
        u2 = self._rng.next_double()
        if u1 == 0.0:
            u1 = _U53  # log(0) guard; hit with probability 2**-53
        r = math.sqrt(-2.0 * math.log(u1))
        return r * math.cos(_TWO_PI * u2), r * math.sin(_TWO_PI * u2)

    def draw(self, count: int) -> np.ndarray:
        """Next `count` standard normals as a float64 vector."""
        if count < 0:
            raise ValueError("count must be non-negative")
        out = np.empty(count)
        for i in range(0, count - 1, 2):
            out[i], out[i + 1] = self.next_pair()
        if count % 2:
            out[count - 1] = self.next_pair()[0]
        return out
