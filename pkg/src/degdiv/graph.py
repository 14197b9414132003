"""Immutable bitrow graphs and the degree / diversity primitives.

Vertices are dense indices ``[0, n)``.  A vertex set is a plain Python int
used as a bitmask, so every degree-style query is a masked popcount; this is
what keeps the exact oracles (which enumerate 2^n subsets) and the Monte-Carlo
pipeline cheap.  Graphs are immutable after construction and safe to share
across threads.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

from .errors import InvalidPair, InvalidParams, InvalidSet

VertexSet = int  # bitmask over [0, n)


def full_mask(n: int) -> VertexSet:
    return (1 << n) - 1


def mask_of(vertices: Iterable[int]) -> VertexSet:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: VertexSet) -> Iterator[int]:
    """Iterate set bit positions in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """Simple undirected graph: vertex count plus per-vertex neighbor bitrows.

    Invariants: no self-loops (``v not in adj[v]``) and symmetry
    (``u in adj[v]`` iff ``v in adj[u]``).  Construction paths inside this
    package maintain them; ``validate()`` re-checks from scratch.
    """

    __slots__ = ("n", "adj")

    def __init__(self, n: int, adj: Sequence[int]):
        if n < 0 or len(adj) != n:
            raise InvalidParams(f"adjacency length {len(adj)} != n={n}")
        self.n = n
        self.adj = tuple(adj)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidSet(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                continue
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, rows)

    def validate(self) -> None:
        full = full_mask(self.n)
        for v, row in enumerate(self.adj):
            if row & ~full:
                raise InvalidSet(f"row {v} has out-of-range bits")
            if row >> v & 1:
                raise InvalidSet(f"self-loop at {v}")
        for v in range(self.n):
            for u in bits(self.adj[v]):
                if not self.adj[u] >> v & 1:
                    raise InvalidSet(f"asymmetric pair ({u},{v})")

    @property
    def vertices(self) -> VertexSet:
        return full_mask(self.n)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def degrees(self) -> list[int]:
        return [row.bit_count() for row in self.adj]

    def edge_count(self) -> int:
        return sum(self.degrees()) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            row = self.adj[u] >> (u + 1) << (u + 1)  # only v > u
            for v in bits(row):
                yield (u, v)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self):
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count()})"


def check_set(G: Graph, S: VertexSet) -> None:
    if S < 0 or S >> G.n:
        raise InvalidSet(f"vertex set {bin(S)} not within [0,{G.n})")


def induced_subgraph(G: Graph, S: VertexSet) -> tuple[Graph, tuple[int, ...]]:
    """``G[S]`` plus the map new index -> old index.

    The explicit index map lets nested constructions translate witness sets
    back to the root graph.
    """
    check_set(G, S)
    old = tuple(bits(S))
    pos = {v: i for i, v in enumerate(old)}
    rows = []
    for v in old:
        row = 0
        for u in bits(G.adj[v] & S):
            row |= 1 << pos[u]
        rows.append(row)
    return Graph(len(old), rows), old


def complement(G: Graph) -> Graph:
    full = full_mask(G.n)
    return Graph(G.n, [full & ~row & ~(1 << v) for v, row in enumerate(G.adj)])


def deg_to(G: Graph, u: int, S: VertexSet) -> int:
    """|N(u) ∩ S|."""
    check_set(G, S)
    if not 0 <= u < G.n:
        raise InvalidSet(f"vertex {u} out of range")
    return (G.adj[u] & S).bit_count()


def diversity(G: Graph, u: int, v: int, S: VertexSet) -> int:
    """Size of the symmetric difference of the two neighborhoods inside S."""
    if u == v:
        raise InvalidPair(f"diversity needs two distinct vertices, got {u}")
    check_set(G, S)
    return ((G.adj[u] ^ G.adj[v]) & S).bit_count()


def distinct_degree_count(G: Graph, S: VertexSet) -> int:
    """Number of distinct degrees among the vertices of G[S]."""
    check_set(G, S)
    if S == 0:
        raise InvalidSet("distinct_degree_count needs a nonempty set")
    return len({(G.adj[v] & S).bit_count() for v in bits(S)})


def degree_stats(G: Graph) -> tuple[int, int, float]:
    """(max degree, min degree, average degree)."""
    if G.n == 0:
        raise InvalidParams("degree_stats needs at least one vertex")
    degs = G.degrees()
    return max(degs), min(degs), sum(degs) / G.n


def is_diverse(G: Graph, U: VertexSet, S: VertexSet, D: float) -> bool:
    """True iff every pair of distinct u,v in U has |N^S(u) Δ N^S(v)| >= D."""
    check_set(G, U)
    check_set(G, S)
    members = list(bits(U))
    for i, u in enumerate(members):
        row_u = G.adj[u]
        for v in members[i + 1 :]:
            if ((row_u ^ G.adj[v]) & S).bit_count() < D:
                return False
    return True


def min_pair_diversity(G: Graph, U: VertexSet, S: VertexSet) -> int:
    """Smallest pairwise neighborhood difference within U, restricted to S."""
    members = list(bits(U))
    best = S.bit_count() + 1
    for i, u in enumerate(members):
        row_u = G.adj[u]
        for v in members[i + 1 :]:
            d = ((row_u ^ G.adj[v]) & S).bit_count()
            if d < best:
                best = d
    return best


def is_balanced(G: Graph, U: VertexSet, S: VertexSet, gamma: float) -> bool:
    """True iff every vertex of S has at most gamma*|U| neighbors inside U."""
    check_set(G, U)
    check_set(G, S)
    if not 0.0 <= gamma <= 1.0:
        raise InvalidParams(f"gamma must lie in [0,1], got {gamma}")
    if U == 0:
        raise InvalidSet("is_balanced needs a nonempty U")
    cap = gamma * U.bit_count()
    return all((G.adj[v] & U).bit_count() <= cap for v in bits(S))


def write_edgelist(G: Graph, path: str) -> None:
    """Text format: header "n m", then one "u v" line per edge, 0-based."""
    with open(path, "w") as fh:
        fh.write(f"{G.n} {G.edge_count()}\n")
        for u, v in G.edges():
            fh.write(f"{u} {v}\n")


def read_edgelist(path: str) -> Graph:
    """Inverse of write_edgelist; blank lines and '#' comments are ignored."""
    header = None
    edges = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if header is None:
                if len(parts) != 2:
                    raise InvalidParams(f"bad header line: {line!r}")
                header = (int(parts[0]), int(parts[1]))
                continue
            if len(parts) != 2:
                raise InvalidParams(f"bad edge line: {line!r}")
            edges.append((int(parts[0]), int(parts[1])))
    if header is None:
        raise InvalidParams("empty edge-list file")
    n, m = header
    if len(edges) != m:
        raise InvalidParams(f"header promises {m} edges, file has {len(edges)}")
    return Graph.from_edges(n, edges)
