"""Deterministic, splittable randomness.

Two mechanisms, both counter-based so results never depend on thread count or
evaluation order:

* splitmix64 hashing for per-edge decisions (``edge_mask``) and for deriving
  independent child seeds from a master seed (``derive``);
* numpy's Philox engine, keyed by a derived seed, for bulk Monte-Carlo
  sampling (``generator``).
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """splitmix64 finalizer; a 64-bit bijection with good avalanche."""
    x = (x + _GAMMA) & MASK64
    x = ((x ^ (x >> 30)) * _MIX1) & MASK64
    x = ((x ^ (x >> 27)) * _MIX2) & MASK64
    return x ^ (x >> 31)


def derive(seed: int, *tags: int) -> int:
    """Derive an independent 64-bit child seed from ``seed`` and integer tags."""
    h = mix64(seed & MASK64)
    for t in tags:
        h = mix64(h ^ mix64(t & MASK64))
    return h


def generator(seed: int, *tags: int) -> np.random.Generator:
    """A Philox-backed generator keyed by ``derive(seed, *tags)``."""
    return np.random.Generator(np.random.Philox(key=derive(seed, *tags)))


def _mix64_array(x: np.ndarray) -> np.ndarray:
    # vectorized splitmix64 finalizer; uint64 arithmetic wraps as intended
    x = (x + np.uint64(_GAMMA)).astype(np.uint64)
    x ^= x >> np.uint64(30)
    x *= np.uint64(_MIX1)
    x ^= x >> np.uint64(27)
    x *= np.uint64(_MIX2)
    x ^= x >> np.uint64(31)
    return x


def edge_mask(seed: int, n: int, u: int, vs: np.ndarray, p: float) -> np.ndarray:
    """Boolean array: include edge (u, v) for each v in ``vs``?

    The decision is hash(seed, u, v) < p, so any subrange of pairs can be
    generated independently and still agree with a full pass.
    """
    if p <= 0.0:
        return np.zeros(len(vs), dtype=bool)
    if p >= 1.0:
        return np.ones(len(vs), dtype=bool)
    key = np.uint64(mix64(seed & MASK64))
    codes = (np.uint64(u) * np.uint64(n) + vs.astype(np.uint64)) ^ key
    h = _mix64_array(codes)
    thr = np.uint64(int(p * 2.0**64))
    return h < thr
