"""Distributions on [0.1, 0.9]^S, expected degrees, and the small-ball
quantity ``bad``.

A Distribution is a tagged tree: Trivial (constant 1/2), UniformConstant
(one shared uniform coordinate), Blended (1/2 plus uniform multiples of
anchor-neighborhood directions, clamped), and Product (independent factors
with pairwise disjoint domains).  Blended freezes its direction vectors at
construction, so a distribution is self-contained data: sampling never
consults the graph again.

``bad`` for a vertex pair is the worst window of width 2*half_width for the
expected-degree difference, estimated by Monte Carlo: sort the sampled
differences and slide a window anchored at sample points, which attains the
empirical supremum exactly.  The estimator is upward-consistent for the true
supremum over shift centers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from .errors import (
    InsufficientTrials,
    InvalidDomain,
    InvalidPair,
    InvalidParams,
)
from .graph import Graph, VertexSet, bits, check_set

_CHUNK = 4096  # fixed sampling chunk so results never depend on memory limits


@dataclass(eq=False)
class ProbVector:
    """Assignment v -> p_v over ``domain``; values outside the domain are 0
    and must not be read (expected_degree enforces the domain check)."""

    values: np.ndarray
    domain: VertexSet

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Trivial:
    """The constant-1/2 vector on its domain, with probability one."""

    domain: VertexSet


@dataclass(frozen=True)
class UniformConstant:
    """alpha * 1_S with a single alpha ~ Unif[0.1, 0.9]."""

    domain: VertexSet


@dataclass(frozen=True)
class Blended:
    """1/2 + sum_i alpha_i * dir_i with alpha_i ~ Unif[-beta, beta] i.i.d.,
    clamped coordinatewise to [0.1, 0.9] after summing.

    ``directions`` are the anchor neighborhoods already projected onto the
    domain (frozen at construction via the ``blended`` factory).
    """

    anchors: tuple[int, ...]
    domain: VertexSet
    beta: float
    directions: tuple[int, ...] = field(repr=False)

    def __post_init__(self):
        if not self.anchors:
            raise InvalidParams("blended distribution needs at least one anchor")
        if not 0.0 < self.beta <= 0.4:
            raise InvalidParams(f"beta must lie in (0, 0.4], got {self.beta}")


@dataclass(frozen=True)
class Product:
    """Independent factors on pairwise disjoint coordinate sets."""

    children: tuple["Distribution", ...]

    def __post_init__(self):
        if not self.children:
            raise InvalidParams("product distribution needs at least one child")
        seen = 0
        for child in self.children:
            if seen & child.domain:
                raise InvalidDomain("product children must have disjoint domains")
            seen |= child.domain

    @property
    def domain(self) -> VertexSet:
        m = 0
        for child in self.children:
            m |= child.domain
        return m


Distribution = Union[Trivial, UniformConstant, Blended, Product]


def blended(G: Graph, anchors: Iterable[int], S: VertexSet, beta: float) -> Blended:
    """Construct the blended distribution, freezing proj_S of each anchor's
    neighborhood in G."""
    check_set(G, S)
    anchor_list = tuple(sorted(set(anchors)))
    for u in anchor_list:
        if not 0 <= u < G.n:
            raise InvalidDomain(f"anchor {u} outside the host graph")
    dirs = tuple(G.adj[u] & S for u in anchor_list)
    return Blended(anchor_list, S, beta, dirs)


def product_with_rest(children: Iterable[Distribution], total: VertexSet) -> Distribution:
    """Product of ``children`` padded with a Trivial factor so the domain is
    exactly ``total``."""
    kids = [c for c in children if c.domain]
    covered = 0
    for c in kids:
        covered |= c.domain
    rest = total & ~covered
    if rest:
        kids.append(Trivial(rest))
    if not kids:
        return Trivial(0)
    if len(kids) == 1:
        return kids[0]
    return Product(tuple(kids))


@dataclass(frozen=True)
class BadEstimate:
    value: float
    trials: int
    std_err: float


def _mask_bools(mask: VertexSet, n: int) -> np.ndarray:
    """Boolean membership array of length n for a bitmask (vectorized)."""
    if n == 0:
        return np.zeros(0, dtype=bool)
    raw = np.frombuffer(mask.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little", count=n).astype(bool)


def _cols(mask: VertexSet) -> np.ndarray:
    if mask == 0:
        return np.empty(0, dtype=np.int64)
    return np.flatnonzero(_mask_bools(mask, mask.bit_length()))


def _fill_batch(D: Distribution, out: np.ndarray, gen) -> None:
    """Fill the domain columns of ``out`` (rows = samples) in place."""
    if isinstance(D, Trivial):
        if D.domain:
            out[:, _cols(D.domain)] = 0.5
    elif isinstance(D, UniformConstant):
        alpha = gen.uniform(0.1, 0.9, size=len(out))
        if D.domain:
            out[:, _cols(D.domain)] = alpha[:, None]
    elif isinstance(D, Blended):
        alphas = np.asarray(gen.uniform(-D.beta, D.beta, size=(len(out), len(D.anchors))))
        if D.domain:
            idx = _cols(D.domain)
            nbits = D.domain.bit_length()
            dirs = np.zeros((len(D.directions), len(idx)))
            for i, mask in enumerate(D.directions):
                if mask:
                    dirs[i] = _mask_bools(mask, nbits)[idx]
            block = 0.5 + alphas @ dirs
            np.clip(block, 0.1, 0.9, out=block)
            out[:, idx] = block
    elif isinstance(D, Product):
        for child in D.children:
            _fill_batch(child, out, gen)
    else:
        raise InvalidParams(f"unknown distribution variant {type(D).__name__}")


def sample(D: Distribution, G: Graph, rng) -> ProbVector:
    """Draw one probability vector from D over its domain."""
    check_set(G, D.domain)
    out = np.zeros((1, G.n))
    _fill_batch(D, out, rng)
    return ProbVector(out[0], D.domain)


def expected_degree(G: Graph, p: ProbVector, u: int, S: VertexSet) -> float:
    """E[d^S(u)] under vertex retention by p: the inner product of u's
    neighborhood row with p, restricted to S."""
    check_set(G, S)
    if not 0 <= u < G.n:
        raise InvalidDomain(f"vertex {u} outside the graph")
    if S & ~p.domain:
        raise InvalidDomain("expected_degree needs S within the vector's domain")
    mask = G.adj[u] & S
    if mask == 0:
        return 0.0
    return float(p.values[_cols(mask)].sum())


def is_separated(G: Graph, p: ProbVector, U: VertexSet, D: float) -> bool:
    """True iff expected degrees (over the vector's domain) of distinct
    vertices in U pairwise differ by at least D."""
    check_set(G, U)
    exps = [expected_degree(G, p, u, p.domain) for u in bits(U)]
    for i in range(len(exps)):
        for j in range(i + 1, len(exps)):
            if abs(exps[i] - exps[j]) < D:
                return False
    return True


def _expected_degree_samples(
    D: Distribution, G: Graph, verts: list[int], S: VertexSet, trials: int, gen
) -> np.ndarray:
    """(trials x len(verts)) matrix of E[d^S(v)] over one shared batch."""
    n = G.n
    W = np.zeros((n, len(verts)))
    for i, u in enumerate(verts):
        mask = G.adj[u] & S
        if mask:
            W[_cols(mask), i] = 1.0
    E = np.empty((trials, len(verts)))
    buf = np.zeros((min(_CHUNK, trials), n))
    for start in range(0, trials, _CHUNK):
        m = min(_CHUNK, trials - start)
        _fill_batch(D, buf[:m], gen)
        E[start : start + m] = buf[:m] @ W
    return E


def _max_window(x: np.ndarray, width: float) -> tuple[float, float]:
    """Largest fraction of samples inside any closed window of given width,
    plus the binomial standard error at that fraction."""
    x = np.sort(x)
    m = len(x)
    right = np.searchsorted(x, x + width, side="right")
    q = float((right - np.arange(m)).max()) / m
    return q, math.sqrt(q * (1.0 - q) / m)


def _validate_bad_args(D, G, S, trials):
    check_set(G, S)
    if S & ~D.domain:
        raise InvalidDomain("bad estimation needs S within the distribution domain")
    if trials < 1000:
        raise InsufficientTrials(f"need at least 1000 trials, got {trials}")


def estimate_bad(
    D: Distribution,
    G: Graph,
    u: int,
    v: int,
    S: VertexSet,
    trials: int = 20000,
    rng=None,
    half_width: float = 1.0,
) -> BadEstimate:
    """Monte-Carlo estimate of max_c P(|E d^S(u) - E d^S(v) - c| <= half_width)."""
    if u == v:
        raise InvalidPair("estimate_bad needs distinct vertices")
    _validate_bad_args(D, G, S, trials)
    gen = rng if rng is not None else np.random.Generator(np.random.Philox(key=0))
    E = _expected_degree_samples(D, G, [u, v], S, trials, gen)
    q, se = _max_window(E[:, 0] - E[:, 1], 2.0 * half_width)
    return BadEstimate(q, trials, se)


def bad_sum(
    D: Distribution,
    G: Graph,
    U: VertexSet,
    S: VertexSet,
    trials: int = 20000,
    rng=None,
    half_width: float = 1.0,
) -> float:
    """Sum of pairwise bad estimates over unordered pairs within U, all pairs
    sharing one sample batch (correlated estimates, unbiased per pair)."""
    check_set(G, U)
    _validate_bad_args(D, G, S, trials)
    members = list(bits(U))
    if len(members) < 2:
        return 0.0
    gen = rng if rng is not None else np.random.Generator(np.random.Philox(key=0))
    E = _expected_degree_samples(D, G, members, S, trials, gen)
    total = 0.0
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            total += _max_window(E[:, i] - E[:, j], 2.0 * half_width)[0]
    return total


def bad_cross(
    D: Distribution,
    G: Graph,
    U: VertexSet,
    V: VertexSet,
    S: VertexSet,
    trials: int = 20000,
    rng=None,
    half_width: float = 1.0,
) -> float:
    """Sum of bad estimates over ordered pairs of U x V (identical vertices
    skipped), sharing one sample batch."""
    check_set(G, U)
    check_set(G, V)
    _validate_bad_args(D, G, S, trials)
    us = list(bits(U))
    vs = list(bits(V))
    verts = sorted(set(us) | set(vs))
    pos = {u: i for i, u in enumerate(verts)}
    gen = rng if rng is not None else np.random.Generator(np.random.Philox(key=0))
    E = _expected_degree_samples(D, G, verts, S, trials, gen)
    total = 0.0
    for u in us:
        for v in vs:
            if u == v:
                continue
            total += _max_window(E[:, pos[u]] - E[:, pos[v]], 2.0 * half_width)[0]
    return total
