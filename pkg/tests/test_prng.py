"""Stream pinning tests: the PRNG pipeline must never drift.

The oracle here is an independent straight-line port of the published
splitmix64 and xoshiro256++ reference algorithms, kept deliberately separate
from the library implementation.
"""

import math

import numpy as np
import pytest

from cs_secrecy.prng import GaussianStream, Xoshiro256pp, splitmix64_next

MASK = 0xFFFFFFFFFFFFFFFF


def _oracle_splitmix64(seed, count):
    out = []
    x = seed
    for _ in range(count):
        x = (x + 0x9E3779B97F4A7C15) & MASK
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        out.append(z ^ (z >> 31))
    return out


def _oracle_xoshiro_stream(seed, count):
    def rotl(x, k):
        return ((x << k) | (x >> (64 - k))) & MASK

    s = _oracle_splitmix64(seed, 4)
    out = []
    for _ in range(count):
        result = (rotl((s[0] + s[3]) & MASK, 23) + s[0]) & MASK
        t = (s[1] << 17) & MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
        out.append(result)
    return out


def test_splitmix64_published_first_outputs():
    # first outputs for seed 0, widely reproduced splitmix64 vector
    s, w = splitmix64_next(0)
    assert w == 16294208416658607535
    s, w = splitmix64_next(s)
    assert w == 7960286522194355700
    s, w = splitmix64_next(s)
    assert w == 487617019471545679


def test_xoshiro_matches_independent_port():
    for seed in (0, 1, 42, 2**64 - 1):
        rng = Xoshiro256pp(seed)
        got = [rng.next_u64() for _ in range(64)]
        assert got == _oracle_xoshiro_stream(seed, 64)


def test_xoshiro_frozen_vectors():
    # regression pins: recorded once from the verified stream
    rng = Xoshiro256pp(0)
    assert [rng.next_u64() for _ in range(4)] == [
        5987356902031041503,
        7051070477665621255,
        6633766593972829180,
        211316841551650330,
    ]
    rng = Xoshiro256pp(42)
    assert [rng.next_u64() for _ in range(4)] == [
        15021278609987233951,
        5881210131331364753,
        18149643915985481100,
        12933668939759105464,
    ]


def test_uniform_uses_top_53_bits():
    words = _oracle_xoshiro_stream(7, 32)
    rng = Xoshiro256pp(7)
    for w in words:
        u = rng.next_double()
        assert u == (w >> 11) * 2.0**-53
        assert 0.0 <= u < 1.0


def test_box_muller_pair_order():
    # recompute the first pairs from the raw uniform stream
    words = _oracle_xoshiro_stream(11, 8)
    uniforms = [(w >> 11) * 2.0**-53 for w in words]
    stream = GaussianStream(11)
    draws = stream.draw(8)
    for i in range(4):
        u1, u2 = uniforms[2 * i], uniforms[2 * i + 1]
        r = math.sqrt(-2.0 * math.log(u1))
        assert draws[2 * i] == r * math.cos(2.0 * math.pi * u2)
        assert draws[2 * i + 1] == r * math.sin(2.0 * math.pi * u2)


def test_odd_draw_discards_trailing_deviate():
    # draw(3) consumes two whole pairs; the next draw starts at pair 3
    reference = GaussianStream(5).draw(6)
    stream = GaussianStream(5)
    first = stream.draw(3)
    np.testing.assert_array_equal(first, reference[:3])
    assert stream.draw(1)[0] == reference[4]  # reference[3] was discarded


def test_draw_is_deterministic():
    a = GaussianStream(99).draw(101)
    b = GaussianStream(99).draw(101)
    np.testing.assert_array_equal(a, b)


def test_seed_range_validation():
    with pytest.raises(ValueError):
        Xoshiro256pp(-1)
    with pytest.raises(ValueError):
        Xoshiro256pp(2**64)
    Xoshiro256pp(2**64 - 1)  # boundary is fine


def test_negative_count_rejected():
    with pytest.raises(ValueError):
        GaussianStream(1).draw(-1)
