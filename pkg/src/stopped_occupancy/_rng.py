"""Counter-keyed random streams usable from numba kernels.

Every replicate draws from its own xoshiro256** state, seeded by hashing
``(seed, replicate, stream)`` through SplitMix64.  A replicate's draws
therefore never depend on how replicates are scheduled across threads.
"""
from __future__ import annotations

import math

import numba as nb
import numpy as np

_U64 = np.uint64
_MASK64 = (1 << 64) - 1

# stream tags
ALLOC = 0
CLOCK = 1
BOXES = 2


@nb.njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


@nb.njit(cache=True)
def stream_key(seed, replicate, stream):
    golden = _U64(0x9E3779B97F4A7C15)
    k = _mix(_U64(seed) + golden)
    k = _mix(k ^ (_U64(replicate) + golden))
    return _mix(k ^ (_U64(stream) + golden))


@nb.njit(cache=True)
def new_state(seed, replicate, stream):
    key = stream_key(seed, replicate, stream)
    state = np.empty(4, np.uint64)
    golden = _U64(0x9E3779B97F4A7C15)
    x = key
    for i in range(4):
        x = x + golden
        state[i] = _mix(x)
    return state


@nb.njit(cache=True, inline="always")
def _rotl(x, k):
    return (x << _U64(k)) | (x >> _U64(64 - k))


@nb.njit(cache=True, inline="always")
def next_u64(s):
    s0 = s[0]
    s1 = s[1]
    s2 = s[2]
    s3 = s[3]
    result = _rotl(s1 * _U64(5), 7) * _U64(9)
    t = s1 << _U64(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    s[0] = s0
    s[1] = s1
    s[2] = s2
    s[3] = s3
    return result


@nb.njit(cache=True, inline="always")
def next_double(s):
    """Uniform on [0, 1) with 53 random bits."""
    return float(next_u64(s) >> _U64(11)) * (1.0 / 9007199254740992.0)


@nb.njit(cache=True)
def next_exponential(s):
    return -math.log1p(-next_double(s))


@nb.njit(cache=True)
def next_normal(s):
    # Marsaglia polar method; the second variate is discarded
    while True:
        u = 2.0 * next_double(s) - 1.0
        v = 2.0 * next_double(s) - 1.0
        q = u * u + v * v
        if 0.0 < q < 1.0:
            return u * math.sqrt(-2.0 * math.log(q) / q)


@nb.njit(cache=True)
def next_gamma(s, shape):
    """Gamma(shape, 1) by Marsaglia-Tsang; ``shape`` > 0."""
    if shape < 1.0:
        u = next_double(s)
        return next_gamma(s, shape + 1.0) * u ** (1.0 / shape)
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = next_normal(s)
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = next_double(s)
        if u < 1.0 - 0.0331 * x * x * x * x:
            return d * v
        if math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
            return d * v


@nb.njit(cache=True)
def next_poisson(s, lam):
    """Exact Poisson(lam): inversion below 10, PTRS (Hormann 1993) above."""
    if lam <= 0.0:
        return 0
    if lam < 10.0:
        k = 0
        p = math.exp(-lam)
        cdf = p
        u = next_double(s)
        while u > cdf:
            k += 1
            p *= lam / k
            cdf += p
            if p < 1e-300 and cdf >= 1.0 - 1e-16:
                break
        return k
    slam = math.sqrt(lam)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    while True:
        u = next_double(s) - 0.5
        v = next_double(s)
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + lam + 0.43)
        if us >= 0.07 and v <= vr:
            return int(k)
        if k < 0 or (us < 0.013 and v > us):
            continue
        lhs = math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)
        if lhs <= -lam + k * loglam - math.lgamma(k + 1.0):
            return int(k)


@nb.njit(cache=True, inline="always")
def next_below(s, n):
    """Uniform integer in [0, n) for 1 <= n < 2**32 (Lemire, with rejection)."""
    nn = _U64(n)
    thresh = (_U64(4294967296) - nn) % nn
    while True:
        prod = (next_u64(s) >> _U64(32)) * nn
        if (prod & _U64(0xFFFFFFFF)) >= thresh:
            return np.int64(prod >> _U64(32))


def as_seed(seed: int | None) -> int:
    """Normalize a user seed to an unsigned 64-bit integer."""
    if seed is None:
        return int(np.random.SeedSequence().entropy) & _MASK64
    return int(seed) & _MASK64


def generator(seed: int, *words: int) -> np.random.Generator:
    """A numpy Generator keyed by ``seed`` and extra integer words."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([as_seed(seed), *map(int, words)])))
