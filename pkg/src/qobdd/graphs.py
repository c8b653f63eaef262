"""Simple graphs, path decompositions, and decomposition-derived orders.

The decomposition heuristic aims for small width, not optimal width;
every returned decomposition is validated against the three defining
conditions (vertex coverage, edge coverage, contiguous occurrence).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .obdd import VarOrder


class GraphError(Exception):
    pass


class Graph:
    """Undirected simple graph over integer vertices."""

    def __init__(self, vertices: Iterable[int], edges: Iterable[tuple[int, int]] = ()):
        self.vertices = tuple(sorted(set(vertices)))
        self.adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        self._edges: set[tuple[int, int]] = set()
        for u, w in edges:
            self.add_edge(u, w)

    def add_edge(self, u: int, w: int) -> None:
        if u == w:
            raise GraphError(f"loop at vertex {u}")
        if u not in self.adj or w not in self.adj:
            raise GraphError(f"edge ({u},{w}) uses unknown vertex")
        self.adj[u].add(w)
        self.adj[w].add(u)
        self._edges.add((min(u, w), max(u, w)))

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self._edges)

    def neighbors(self, v: int) -> set[int]:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max((len(s) for s in self.adj.values()), default=0)

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.vertices == other.vertices
            and self._edges == other._edges
        )

    def __repr__(self) -> str:
        return f"Graph({len(self.vertices)} vertices, {len(self._edges)} edges)"


def parse_edge_list(text: str) -> Graph:
    """Edge-list file: one `u v` pair per line, 1-based ids."""
    edges = []
    vertices: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("c"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected `u v`, got {line!r}")
        u, w = int(parts[0]), int(parts[1])
        vertices.update((u, w))
        edges.append((u, w))
    return Graph(vertices, edges)


def emit_edge_list(g: Graph) -> str:
    return "\n".join(f"{u} {w}" for u, w in g.edges()) + "\n"


@dataclass(frozen=True)
class PathDecomposition:
    bags: tuple[frozenset[int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def validate(self, g: Graph) -> None:
        """Check vertex coverage, edge coverage, and occurrence contiguity."""
        covered = set().union(*self.bags) if self.bags else set()
        missing = set(g.vertices) - covered
        if missing:
            raise GraphError(f"vertices {sorted(missing)} in no bag")
        for u, w in g.edges():
            if not any(u in b and w in b for b in self.bags):
                raise GraphError(f"edge ({u},{w}) in no bag")
        for v in covered:
            hits = [i for i, b in enumerate(self.bags) if v in b]
            if hits[-1] - hits[0] + 1 != len(hits):
                raise GraphError(f"vertex {v} occurs non-contiguously")


def _separation_width(g: Graph, order: Sequence[int]) -> int:
    pos = {v: i for i, v in enumerate(order)}
    width = 0
    for i, v in enumerate(order):
        bag = 1 + sum(
            1
            for u in order[: i + 1]
            if u != v and any(pos[w] >= i for w in g.adj[u])
        )
        width = max(width, bag)
    return width - 1


def _bags_from_order(g: Graph, order: Sequence[int]) -> PathDecomposition:
    pos = {v: i for i, v in enumerate(order)}
    last = {v: max((pos[w] for w in g.adj[v]), default=pos[v]) for v in order}
    bags = []
    for i, v in enumerate(order):
        bag = {u for u in order[: i + 1] if last[u] >= i}
        bag.add(v)
        bags.append(frozenset(bag))
    return PathDecomposition(tuple(bags))


def _min_degree_order(g: Graph) -> list[int]:
    # eliminate on a shrinking copy, connecting each vertex's neighborhood
    adj = {v: set(g.adj[v]) for v in g.vertices}
    order = []
    remaining = set(g.vertices)
    while remaining:
        v = min(remaining, key=lambda u: (len(adj[u]), u))
        order.append(v)
        nbrs = adj[v] & remaining
        for a in nbrs:
            adj[a].discard(v)
            adj[a].update(nbrs - {a})
        remaining.remove(v)
    return order


def _bfs_order(g: Graph) -> list[int]:
    order: list[int] = []
    seen: set[int] = set()
    for start in sorted(g.vertices, key=lambda v: (g.degree(v), v)):
        if start in seen:
            continue
        queue = [start]
        seen.add(start)
        while queue:
            v = queue.pop(0)
            order.append(v)
            for w in sorted(g.adj[v]):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    return order


def path_decomposition(g: Graph) -> PathDecomposition:
    """Heuristically narrow path decomposition, validated before return.

    Tries a handful of vertex orders (identity, breadth-first, min-degree
    elimination) and keeps the one of smallest separation width.
    """
    if not g.vertices:
        return PathDecomposition(())
    candidates = [list(g.vertices), _bfs_order(g), _min_degree_order(g)]
    best = min(candidates, key=lambda o: _separation_width(g, o))
    pd = _bags_from_order(g, best)
    pd.validate(g)
    return pd


def order_from_decomposition(pd: PathDecomposition) -> VarOrder:
    """Variables by first-bag index, ties broken by ascending id."""
    first: dict[int, int] = {}
    for i, bag in enumerate(pd.bags):
        for v in bag:
            if v not in first:
                first[v] = i
    return VarOrder(sorted(first, key=lambda v: (first[v], v)))


def random_dregular(n: int, degree: int, seed: int | random.Random = 0) -> Graph:
    """Random regular graph by the pairing model, resampled until simple."""
    if n <= 0 or degree < 0:
        raise GraphError("need n > 0 and degree >= 0")
    if (n * degree) % 2 != 0:
        raise GraphError("n * degree must be even")
    if degree >= n:
        raise GraphError("degree must be below n for a simple graph")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    points = [v for v in range(1, n + 1) for _ in range(degree)]
    for _ in range(100000):
        rng.shuffle(points)
        pairs = [(points[i], points[i + 1]) for i in range(0, len(points), 2)]
        if any(u == w for u, w in pairs):
            continue
        norm = {(min(u, w), max(u, w)) for u, w in pairs}
        if len(norm) != len(pairs):
            continue
        return Graph(range(1, n + 1), pairs)
    raise GraphError("pairing model failed to produce a simple graph")


def expansion(g: Graph, limit: int = 20) -> Fraction:
    """Exact vertex expansion: min |N(S)| / |S| over S with |S| <= |V|/2.

    N(S) is the open neighborhood (vertices outside S adjacent to S).
    Exhaustive over all subsets, so only feasible for small graphs; raises
    once |V| exceeds ``limit``.
    """
    n = len(g.vertices)
    if n == 0:
        raise GraphError("expansion of the empty graph is undefined")
    if n > limit:
        raise GraphError(f"exhaustive expansion limited to {limit} vertices")
    verts = g.vertices
    best: Fraction | None = None
    for mask in range(1, 1 << n):
        size = mask.bit_count()
        if 2 * size > n:
            continue
        subset = {verts[i] for i in range(n) if mask >> i & 1}
        nbhd = set()
        for v in subset:
            nbhd.update(g.adj[v])
        nbhd -= subset
        ratio = Fraction(len(nbhd), size)
        if best is None or ratio < best:
            best = ratio
    assert best is not None
    return best
