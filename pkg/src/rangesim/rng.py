"""Deterministic 64-bit PRNG used by every simulation in this package.

The generator is xorshift64* seeded through the splitmix64 finalizer, so a
given seed produces the same stream on every platform and build.  Uniform
variates are built from 53 random bits as (k + 0.5) * 2**-53, which keeps
them strictly inside (0, 1); downstream samplers rely on never seeing 0 or 1.

An ``Rng`` instance is single-owner: one generator per simulation run, never
shared across threads.
"""

from __future__ import annotations

import numpy as np
from numba import njit
from numba import types

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15

_u64 = types.uint64
_f64 = types.float64


@njit(_u64(_u64), cache=True, nogil=True)
def mix64(z):
    """splitmix64 finalizer; bijective on 64-bit words."""
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(_u64(_u64), cache=True, nogil=True)
def seed_state(seed):
    """Initial xorshift64* state for a seed; never returns 0."""
    s = mix64(seed + np.uint64(GOLDEN))
    if s == np.uint64(0):
        s = np.uint64(GOLDEN)
    return s


@njit(types.UniTuple(_u64, 2)(_u64), cache=True, nogil=True)
def next_u64(state):
    """One xorshift64* step: (new_state, output word)."""
    x = state
    x ^= x >> np.uint64(12)
    x ^= x << np.uint64(25)
    x ^= x >> np.uint64(27)
    return x, x * np.uint64(0x2545F4914F6CDD1D)


@njit(types.Tuple((_u64, _f64))(_u64), cache=True, nogil=True)
def next_uniform(state):
    """Uniform double in the open interval (0, 1)."""
    state, x = next_u64(state)
    return state, (np.float64(x >> np.uint64(11)) + 0.5) * (2.0 ** -53)


@njit(types.Tuple((_u64, _u64))(_u64, _u64), cache=True, nogil=True)
def next_below(state, n):
    """Unbiased uniform integer in [0, n); n must be positive."""
    # classic rejection bound: accept x >= 2**64 mod n
    threshold = (np.uint64(0) - n) % n
    while True:
        state, x = next_u64(state)
        if x >= threshold:
            return state, x % n


@njit(types.Tuple((_u64, _f64))(_u64, _f64), cache=True, nogil=True)
def next_exponential(state, rate):
    state, u = next_uniform(state)
    return state, -np.log(u) / rate


def derive_run_seed(master: int, run_index: int) -> int:
    """Per-run seed from a master seed; bit-exact across platforms.

    Distinct run indices give distinct streams (the map is a bijection of
    the master seed for each index).
    """
    z = (master ^ (GOLDEN * (run_index + 1))) & MASK64
    return int(mix64(np.uint64(z)))


class Rng:
    """Mutable wrapper around the raw generator state.

    Same seed, same sequence.  Not thread-safe by contract: a run owns its
    generator exclusively.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = int(seed_state(np.uint64(seed & MASK64)))

    @property
    def state(self) -> int:
        return self._state

    def set_state(self, state: int) -> None:
        self._state = int(state) & MASK64

    def next_u64(self) -> int:
        self._state, out = next_u64(np.uint64(self._state))
        return int(out)

    def uniform(self) -> float:
        self._state, u = next_uniform(np.uint64(self._state))
        return float(u)

    def exponential(self, rate: float) -> float:
        self._state, x = next_exponential(np.uint64(self._state), rate)
        return float(x)

    def below(self, n: int) -> int:
        self._state, k = next_below(np.uint64(self._state), np.uint64(n))
        return int(k)
