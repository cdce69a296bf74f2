"""Alias-method sampling and the small counter-based RNG used by the kernels.

The jitted kernels carry their RNG state as a single uint64 (xorshift64*),
seeded through splitmix64 so that any (seed, stream) pair gives an
independent, reproducible stream regardless of thread count.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_MASK = 0xFFFFFFFFFFFFFFFF


@njit(cache=True)
def splitmix64(x):
    z = np.uint64(x) + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def stream_state(seed, stream):
    s = splitmix64(splitmix64(np.uint64(seed)) ^ np.uint64(stream))
    if s == np.uint64(0):
        s = np.uint64(0x2545F4914F6CDD1D)
    return s


@njit(cache=True)
def next_u64(state):
    """Advance a one-element uint64 state array; return a 64-bit draw."""
    x = state[0]
    x ^= x >> np.uint64(12)
    x ^= x << np.uint64(25)
    x ^= x >> np.uint64(27)
    state[0] = x
    return x * np.uint64(0x2545F4914F6CDD1D)


@njit(cache=True)
def next_float(state):
    # 53 high bits -> [0, 1)
    return float(next_u64(state) >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def next_int(state, n):
    return int(next_float(state) * n)


@njit(cache=True)
def vose_build(weights):
    """Return ``(prob, alias)`` for positive ``weights`` (Vose's method)."""
    n = weights.shape[0]
    prob = np.empty(n, dtype=np.float64)
    alias = np.empty(n, dtype=np.int64)
    total = 0.0
    for i in range(n):
        total += weights[i]
    scaled = np.empty(n, dtype=np.float64)
    small = np.empty(n, dtype=np.int64)
    large = np.empty(n, dtype=np.int64)
    ns = 0
    nl = 0
    for i in range(n):
        scaled[i] = weights[i] * n / total
        if scaled[i] < 1.0:
            small[ns] = i
            ns += 1
        else:
            large[nl] = i
            nl += 1
    while ns > 0 and nl > 0:
        ns -= 1
        s = small[ns]
        g = large[nl - 1]
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        if scaled[g] < 1.0:
            nl -= 1
            small[ns] = g
            ns += 1
    # leftovers are 1 up to rounding
    for k in range(nl):
        prob[large[k]] = 1.0
        alias[large[k]] = large[k]
    for k in range(ns):
        prob[small[k]] = 1.0
        alias[small[k]] = small[k]
    return prob, alias


@njit(cache=True)
def alias_draw(prob, alias, start, n, state):
    """Draw a local index in ``[0, n)`` from the table slice at ``start``."""
    k = next_int(state, n)
    if next_float(state) < prob[start + k]:
        return k
    return alias[start + k]


class AliasTable:
    """O(1) sampler for a fixed discrete distribution proportional to ``weights``."""

    def __init__(self, weights):
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("alias table needs a non-empty 1-d weight vector")
        if not np.all(w > 0) or not np.all(np.isfinite(w)):
            raise ValueError("alias table weights must be finite and strictly positive")
        self.weights = w
        self.prob, self.alias = vose_build(w)

    def __len__(self):
        return self.prob.shape[0]

    def probabilities(self) -> np.ndarray:
        """Exact distribution encoded by the table (for checking)."""
        n = len(self)
        p = self.prob / n
        out = p.copy()
        np.add.at(out, self.alias, (1.0 - self.prob) / n)
        return out

    def sample(self, rng: np.random.Generator, size=None):
        n = len(self)
        k = rng.integers(0, n, size=size)
        u = rng.random(size=size)
        return np.where(u < self.prob[k], k, self.alias[k])


def build_alias_table(weights) -> AliasTable:
    return AliasTable(weights)
