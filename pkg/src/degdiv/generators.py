"""Extremal graph families and seeded Erdős–Rényi graphs.

All constructors are pure: identical parameters (and seed) yield bit-identical
graphs, regardless of thread count.
"""

from __future__ import annotations

import math

import numpy as np

from . import rng
from .errors import InvalidParams
from .graph import Graph, full_mask


def turan(n: int, k: int) -> Graph:
    """Complete k-partite graph on n vertices with near-equal parts.

    Part sizes differ by at most one (the first n mod k parts get the extra
    vertex), so the independence number is ceil(n/k) and the clique number k.
    """
    if k < 1 or k > n:
        raise InvalidParams(f"turan needs 1 <= k <= n, got n={n}, k={k}")
    base, extra = divmod(n, k)
    part_masks = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        part_masks.append(((1 << size) - 1) << start)
        start += size
    full = full_mask(n)
    rows = []
    for part in part_masks:
        other = full & ~part
        for _ in range(part.bit_count()):
            rows.append(other)
    return Graph(n, rows)


def iterated_turan(n: int, b: int, inner_parts: int | None = None) -> Graph:
    """b blocks of size n/b, each holding the complement of an inner Turán
    graph, with all cross-block pairs joined.

    The inner graph is the sqrt(n)-partite Turán graph on n/b vertices, so its
    complement is a disjoint union of cliques of size sqrt(n)/b.  Parameters
    must divide cleanly; anything else is rejected rather than rounded.
    ``inner_parts`` overrides the sqrt(n) inner part count.
    """
    if n < 1 or b < 1 or n % b:
        raise InvalidParams(f"iterated_turan needs b | n, got n={n}, b={b}")
    block = n // b
    if inner_parts is None:
        q = math.isqrt(n)
        if q * q != n:
            raise InvalidParams(f"iterated_turan needs square n, got n={n}")
    else:
        q = inner_parts
    if q < 1 or q > block or block % q:
        raise InvalidParams(
            f"inner part count {q} must divide the block size {block}"
        )
    clique = block // q
    full = full_mask(n)
    rows = []
    for v in range(n):
        block_lo = (v // block) * block
        block_mask = ((1 << block) - 1) << block_lo
        clique_lo = block_lo + ((v - block_lo) // clique) * clique
        clique_mask = ((1 << clique) - 1) << clique_lo
        rows.append((full & ~block_mask) | (clique_mask & ~(1 << v)))
    return Graph(n, rows)


def gnp(n: int, p: float, seed: int) -> Graph:
    """Erdős–Rényi G(n, p), each pair decided by hash(seed, u, v) < p.

    The per-pair hash makes generation embarrassingly parallel and exactly
    reproducible for a given (n, p, seed).
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidParams(f"p must lie in [0,1], got {p}")
    if n < 0:
        raise InvalidParams(f"n must be nonnegative, got {n}")
    if n <= 1:
        return Graph(n, [0] * n)
    upper = np.zeros((n, n), dtype=bool)
    for u in range(n - 1):
        vs = np.arange(u + 1, n, dtype=np.uint64)
        upper[u, u + 1 :] = rng.edge_mask(seed, n, u, vs, p)
    adj_bool = upper | upper.T
    packed = np.packbits(adj_bool, axis=1, bitorder="little")
    rows = [int.from_bytes(packed[v].tobytes(), "little") for v in range(n)]
    return Graph(n, rows)
