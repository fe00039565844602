"""Seedable, splittable 64-bit random generator (xoshiro256++).

Replica streams are derived by mixing (seed, replica) through splitmix64,
a fixed avalanche function, so replica r's stream depends only on the pair
(seed, r).  There is no global state: every consumer owns a uint64[4] state
array and passes it to the jitted step functions below.  The pure-Python
`Xoshiro` wrapper drives the same jitted kernels, so both worlds see the
identical stream.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64, int64

_GOLDEN = uint64(0x9E3779B97F4A7C15)
_MASK = (1 << 64) - 1


def as_seed(seed: int) -> np.uint64:
    """Fold an arbitrary Python int into the uint64 seed domain."""
    return np.uint64(seed & _MASK)


@njit(cache=True)
def _splitmix64(z):
    # finalizer of splitmix64; full avalanche on a uint64
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(cache=True)
def stream_state(seed, replica):
    """Initial xoshiro256++ state for stream `replica` of `seed`."""
    s = np.empty(4, dtype=np.uint64)
    z = uint64(seed) ^ (uint64(replica) + uint64(1)) * _GOLDEN
    for i in range(4):
        z = z + _GOLDEN
        s[i] = _splitmix64(z)
    if s[0] == uint64(0) and s[1] == uint64(0) and s[2] == uint64(0) and s[3] == uint64(0):
        s[0] = uint64(1)  # all-zero state is the one forbidden seed
    return s


@njit(cache=True)
def next_u64(s):
    """Advance the state in place and return the next 64-bit word."""
    x = s[0] + s[3]
    out = ((x << uint64(23)) | (x >> uint64(41))) + s[0]
    t = s[1] << uint64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = (s[3] << uint64(45)) | (s[3] >> uint64(19))
    return out


@njit(cache=True)
def next_double(s):
    """Uniform double in [0, 1) with 53 random bits."""
    return (next_u64(s) >> uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def next_below(s, n):
    """Uniform int64 in [0, n) by masked rejection; exact for 1 <= n <= 2^63-1."""
    m = uint64(n - 1)
    m |= m >> uint64(1)
    m |= m >> uint64(2)
    m |= m >> uint64(4)
    m |= m >> uint64(8)
    m |= m >> uint64(16)
    m |= m >> uint64(32)
    while True:
        r = next_u64(s) & m
        if int64(r) < n:
            return int64(r)


class Xoshiro:
    """Convenience wrapper over the jitted kernels for non-hot-path callers."""

    def __init__(self, seed: int, replica: int = 0):
        self._s = stream_state(as_seed(seed), replica)

    def u64(self) -> int:
        return int(next_u64(self._s))

    def random(self) -> float:
        return float(next_double(self._s))

    def below(self, n: int) -> int:
        if not 1 <= n <= (1 << 63) - 1:
            raise ValueError(f"n out of range: {n}")
        return int(next_below(self._s, n))

    @property
    def state(self) -> np.ndarray:
        return self._s
