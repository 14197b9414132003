"""Ground-truth brute force: f(G), hom(G), and small-ball probabilities.

Everything else in the package is measured against these routines on small
instances, so they favor transparency plus enough vectorization to make the
default caps (f at n=20, hom at n=60, small-ball at n=22) run in seconds.
Exceeding a cap raises TooLarge; caps are arguments, never silently relaxed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, TooLarge
from .graph import Graph, VertexSet, complement

DEFAULT_F_CAP = 20
DEFAULT_HOM_CAP = 60
DEFAULT_SMALL_BALL_CAP = 22


def _popcount32(x: np.ndarray) -> np.ndarray:
    # SWAR popcount on uint32 arrays
    x = x - ((x >> np.uint32(1)) & np.uint32(0x55555555))
    x = (x & np.uint32(0x33333333)) + ((x >> np.uint32(2)) & np.uint32(0x33333333))
    x = (x + (x >> np.uint32(4))) & np.uint32(0x0F0F0F0F)
    return (x * np.uint32(0x01010101)) >> np.uint32(24)


def exact_f_witness(G: Graph, cap: int = DEFAULT_F_CAP) -> tuple[int, VertexSet]:
    """Maximum distinct-degree count over all nonempty induced subgraphs,
    together with a witness subset attaining it.

    Enumerates all 2^n subsets in vectorized blocks; for each subset the set
    of occurring degrees is itself packed into an int, so the distinct count
    is one more popcount.
    """
    n = G.n
    if n < 1:
        raise InvalidParams("exact_f needs at least one vertex")
    if n > cap:
        raise TooLarge(f"exact_f cap is {cap}, got n={n}")
    if cap > 30:
        raise InvalidParams("exact_f enumeration is limited to n <= 30")
    adj = np.array(G.adj, dtype=np.uint32)
    one = np.uint32(1)
    best_count, best_mask = 0, 0
    total = 1 << n
    block = 1 << min(n, 18)
    for start in range(0, total, block):
        S = np.arange(start, min(start + block, total), dtype=np.uint32)
        degmask = np.zeros(len(S), dtype=np.uint32)
        for v in range(n):
            member = ((S >> np.uint32(v)) & one).astype(bool)
            dv = _popcount32(adj[v] & S)
            degmask |= np.where(member, np.left_shift(one, dv), np.uint32(0))
        counts = _popcount32(degmask)
        i = int(np.argmax(counts))
        if int(counts[i]) > best_count:
            best_count, best_mask = int(counts[i]), int(S[i])
    return best_count, best_mask


def exact_f(G: Graph, cap: int = DEFAULT_F_CAP) -> int:
    return exact_f_witness(G, cap)[0]


def max_clique(G: Graph) -> tuple[int, VertexSet]:
    """Exact maximum clique via branch and bound with greedy-coloring bounds."""
    n = G.n
    adj = G.adj
    best = [0, 0]  # size, mask

    def expand(rmask: int, rsize: int, P: int) -> None:
        if P == 0:
            if rsize > best[0]:
                best[0], best[1] = rsize, rmask
            return
        # greedy coloring of the candidate set; color = clique-size bound
        order: list[int] = []
        colors: list[int] = []
        Q = P
        c = 0
        while Q:
            c += 1
            avail = Q
            while avail:
                low = avail & -avail
                v = low.bit_length() - 1
                order.append(v)
                colors.append(c)
                Q ^= low
                avail = (avail ^ low) & ~adj[v]
        for i in range(len(order) - 1, -1, -1):
            if rsize + colors[i] <= best[0]:
                return
            v = order[i]
            bit = 1 << v
            expand(rmask | bit, rsize + 1, P & adj[v])
            P &= ~bit

    expand(0, 0, (1 << n) - 1)
    return best[0], best[1]


def exact_hom(G: Graph, cap: int = DEFAULT_HOM_CAP) -> int:
    """max(clique number, independence number), exactly."""
    if G.n > cap:
        raise TooLarge(f"exact_hom cap is {cap}, got n={G.n}")
    if G.n == 0:
        return 0
    return max(max_clique(G)[0], max_clique(complement(G))[0])


@dataclass(frozen=True)
class SmallBallInstance:
    """Weighted Bernoulli sum plus a window half-width.

    weights must be nonzero, probs must lie in [0.1, 0.9].
    """

    weights: tuple[float, ...]
    probs: tuple[float, ...]
    half_width: float = 0.0

    def __post_init__(self):
        if len(self.weights) != len(self.probs):
            raise InvalidParams("weights and probs must have equal length")
        if any(a == 0 for a in self.weights):
            raise InvalidParams("all weights must be nonzero")
        if any(not 0.1 <= p <= 0.9 for p in self.probs):
            raise InvalidParams("all probs must lie in [0.1, 0.9]")
        if self.half_width < 0:
            raise InvalidParams("half_width must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.weights)


def exact_small_ball(inst: SmallBallInstance, cap: int = DEFAULT_SMALL_BALL_CAP) -> float:
    """max over c of P(|sum a_i X_i - c| <= w), by full atom enumeration.

    The maximum over the continuum of centers c is attained with the window's
    left edge on an atom, so a two-pointer sweep over the sorted 2^n atom
    values is exact.
    """
    if inst.n < 1:
        raise InvalidParams("small-ball instance needs at least one weight")
    if inst.n > cap:
        raise TooLarge(f"exact_small_ball cap is {cap}, got n={inst.n}")
    vals = np.zeros(1)
    probs = np.ones(1)
    for a, p in zip(inst.weights, inst.probs):
        vals = np.concatenate([vals, vals + a])
        probs = np.concatenate([probs * (1.0 - p), probs * p])
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    probs = probs[order]
    cum = np.concatenate([[0.0], np.cumsum(probs)])
    right = np.searchsorted(vals, vals + 2.0 * inst.half_width, side="right")
    masses = cum[right] - cum[np.arange(len(vals))]
    return float(masses.max())


def lo_reference(n: int) -> float:
    """C(n, floor(n/2)) / 2^n: the Erdős–Littlewood–Offord ceiling for unit
    weights at p = 1/2."""
    if n < 1:
        raise InvalidParams("lo_reference needs n >= 1")
    return math.comb(n, n // 2) / 2.0**n
