"""Counter-based SplitMix64 streams usable inside numba kernels.

A stream is a two-word ``uint64`` array ``[key, counter]``. Draw ``n`` of a
stream is ``mix(key + n * GOLDEN)``, so any (seed, trial, sub-index) triple
maps to the same numbers regardless of how trials are split across workers.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S11 = np.uint64(11)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0

# domain separators for derived keys
SCENE_DOMAIN = np.uint64(0x5CE7E5CE7E5CE7E5)
UE_DOMAIN = np.uint64(0xA55A0C1A7E0A55A0)


def seed_to_u64(seed: int) -> np.uint64:
    return np.uint64(int(seed) % (1 << 64))


@njit(cache=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True)
def derive_key(parent, index, domain):
    """Key of sub-stream ``index`` under ``parent``."""
    return mix64(parent ^ mix64(np.uint64(index) * GOLDEN + domain))


@njit(cache=True)
def new_stream(key):
    st = np.empty(2, dtype=np.uint64)
    st[0] = key
    st[1] = np.uint64(0)
    return st


@njit(cache=True)
def next_u64(st):
    st[1] += _ONE
    return mix64(st[0] + st[1] * GOLDEN)


@njit(cache=True)
def uniform(st):
    """Uniform double in [0, 1)."""
    return float(next_u64(st) >> _S11) * _INV53


@njit(cache=True)
def exponential(st, mean):
    return -mean * math.log1p(-uniform(st))


@njit(cache=True)
def _poisson_inversion(st, mean):
    if mean <= 0.0:
        return 0
    u = uniform(st)
    p = math.exp(-mean)
    cdf = p
    k = 0
    limit = mean + 40.0 * math.sqrt(mean) + 50.0
    while u > cdf and k < limit:
        k += 1
        p *= mean / k
        cdf += p
    return k


@njit(cache=True)
def poisson(st, mean):
    total = 0
    while mean > 500.0:
        total += _poisson_inversion(st, 500.0)
        mean -= 500.0
    return total + _poisson_inversion(st, mean)
