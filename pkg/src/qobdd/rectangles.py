"""Desk-scale monochromatic-rectangle analysis of graph inner products.

``max_mono_rectangle`` is an exact brute-force oracle: it enumerates, per
color, the closed row subsets of the truth table (row sets of the form
"all rows compatible with some column set"), which cover every maximal
monochromatic rectangle.  With the column-count bound used for pruning
this stays practical to a few dozen rows, enough for 10-vertex graphs
under balanced splits.

``induced_matching`` follows the greedy procedure that repeatedly picks a
cross edge and deletes both closed neighborhoods, so the picked edges are
pairwise non-adjacent and induced.  For a graph on n vertices with an
induced cross matching of size m, every monochromatic rectangle of its
inner product has at most 2^(n-m) models; ``check_rectanglesmall`` tests
that bound against the oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .graphs import Graph

MAX_ORACLE_ROWS = 64


class RectangleLabError(Exception):
    pass


def eval_ipg(g: Graph, assignment: Mapping[int, int]) -> int:
    """Graph inner product: parity of edges with both endpoints set to 1."""
    acc = 0
    for u, w in g.edges():
        acc ^= assignment[u] & assignment[w]
    return acc


@dataclass(frozen=True)
class TruthTable:
    """Bit matrix of f over a two-block split; rows index X1 assignments.

    ``rows[i]`` packs row i as an int: bit j is f(i-th X1 assignment,
    j-th X2 assignment), with side assignments indexed by their bits in
    side-variable order (first variable = least significant bit).
    """

    x1_vars: tuple[int, ...]
    x2_vars: tuple[int, ...]
    rows: tuple[int, ...]

    @property
    def nrows(self) -> int:
        return 1 << len(self.x1_vars)

    @property
    def ncols(self) -> int:
        return 1 << len(self.x2_vars)

    @property
    def balance(self) -> Fraction:
        total = len(self.x1_vars) + len(self.x2_vars)
        return Fraction(min(len(self.x1_vars), len(self.x2_vars)), total)

    @classmethod
    def from_function(
        cls,
        fn: Callable[[Mapping[int, int]], int],
        x1_vars: Sequence[int],
        x2_vars: Sequence[int],
    ) -> "TruthTable":
        if len(x1_vars) > 16 or len(x2_vars) > 16:
            raise RectangleLabError("table sides limited to 16 variables")
        x1, x2 = tuple(x1_vars), tuple(x2_vars)
        rows = []
        for i in range(1 << len(x1)):
            a = {v: (i >> k) & 1 for k, v in enumerate(x1)}
            row = 0
            for j in range(1 << len(x2)):
                a.update({v: (j >> k) & 1 for k, v in enumerate(x2)})
                if fn(a):
                    row |= 1 << j
            rows.append(row)
        return cls(x1, x2, tuple(rows))


def ip_truth_table(g: Graph, partition: tuple[Sequence[int], Sequence[int]]) -> TruthTable:
    x1, x2 = partition
    if set(x1) | set(x2) != set(g.vertices) or set(x1) & set(x2):
        raise RectangleLabError("partition must split the vertex set")
    return TruthTable.from_function(lambda a: eval_ipg(g, a), tuple(x1), tuple(x2))


@dataclass(frozen=True)
class MonoRectangle:
    size: int
    color: int
    row_indices: tuple[int, ...]
    col_indices: tuple[int, ...]


def max_mono_rectangle(tt: TruthTable) -> MonoRectangle:
    """Exact maximum |A| * |B| over rectangles constant on the table.

    Works on whichever axis is shorter; enumerates closed row sets per
    color with branch pruning by the attainable size.  Returns one witness
    of maximum size.  Empty-by-construction rectangles count as size 0.
    """
    nrows, ncols = tt.nrows, tt.ncols
    transposed = False
    rows = tt.rows
    if nrows > ncols:
        transposed = True
        rows = tuple(
            sum(((tt.rows[i] >> j) & 1) << i for i in range(nrows))
            for j in range(ncols)
        )
        nrows, ncols = ncols, nrows
    if nrows > MAX_ORACLE_ROWS:
        raise RectangleLabError(
            f"oracle limited to {MAX_ORACLE_ROWS} rows on the shorter side"
        )
    full_cols = (1 << ncols) - 1
    best = 0
    best_wit: tuple[int, int, int] | None = None  # (color, row mask, col mask)

    for color in (0, 1):
        masks = [r ^ full_cols if color == 0 else r for r in rows]

        def closure(colmask: int) -> int:
            amask = 0
            for i in range(nrows):
                if masks[i] & colmask == colmask:
                    amask |= 1 << i
            return amask

        def visit(amask: int, colmask: int) -> None:
            nonlocal best, best_wit
            size = amask.bit_count() * colmask.bit_count()
            if size > best:
                best = size
                best_wit = (color, amask, colmask)

        def grow(amask: int, colmask: int, start: int) -> None:
            for i in range(start, nrows):
                if amask >> i & 1:
                    continue
                c2 = colmask & masks[i]
                if c2 == 0 or c2.bit_count() * nrows <= best:
                    continue
                a2 = closure(c2)
                if a2 & ((1 << i) - 1) & ~amask:
                    continue  # canonical generation: no new earlier row
                visit(a2, c2)
                grow(a2, c2, i + 1)

        a0 = closure(full_cols)
        visit(a0, full_cols)
        grow(a0, full_cols, 0)

    if best_wit is None:
        return MonoRectangle(0, 0, (), ())
    color, amask, colmask = best_wit
    rows_idx = tuple(i for i in range(nrows) if amask >> i & 1)
    cols_idx = tuple(j for j in range(ncols) if colmask >> j & 1)
    if transposed:
        rows_idx, cols_idx = cols_idx, rows_idx
    return MonoRectangle(best, color, rows_idx, cols_idx)


@dataclass(frozen=True)
class Matching:
    edges: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.edges)

    def endpoints(self) -> set[int]:
        return {v for e in self.edges for v in e}

    def validate_induced(self, g: Graph) -> None:
        eps = self.endpoints()
        if len(eps) != 2 * len(self.edges):
            raise RectangleLabError("matching edges share endpoints")
        chosen = {(min(e), max(e)) for e in self.edges}
        for u, w in g.edges():
            if u in eps and w in eps and (min(u, w), max(u, w)) not in chosen:
                raise RectangleLabError(
                    f"edge ({u},{w}) chords the matching; not induced"
                )


def induced_matching(
    g: Graph, partition: tuple[Sequence[int], Sequence[int]]
) -> Matching:
    """Greedy induced matching across the partition cut.

    Repeatedly match the lowest-id live left vertex with its lowest-id
    right neighbor, then delete both closed neighborhoods; left vertices
    without cross neighbors are dropped as they appear.  Possibly empty.
    """
    x1, x2 = set(partition[0]), set(partition[1])
    alive = set(g.vertices)
    edges: list[tuple[int, int]] = []
    while True:
        pick = None
        for v in sorted(x1 & alive):
            cross = sorted(w for w in g.adj[v] if w in x2 and w in alive)
            if cross:
                pick = (v, cross[0])
                break
            alive.discard(v)
        if pick is None:
            break
        v, w = pick
        edges.append((v, w))
        alive -= {v, w} | g.adj[v] | g.adj[w]
    matching = Matching(tuple(edges))
    matching.validate_induced(g)
    return matching


def check_rectanglesmall(
    g: Graph, partition: tuple[Sequence[int], Sequence[int]]
) -> dict:
    """Compare the oracle's maximum rectangle against the 2^(n-m) bound."""
    n = len(g.vertices)
    matching = induced_matching(g, partition)
    m = len(matching)
    tt = ip_truth_table(g, partition)
    result = max_mono_rectangle(tt)
    bound = 1 << (n - m)
    protocol_rounds_floor = None
    if result.size > 0:
        # a protocol of s rounds forces a monochromatic rectangle of size
        # at least 2^n / (4 e s); invert at the measured maximum
        protocol_rounds_floor = (1 << n) / (4 * math.e * result.size)
    return {
        "n": n,
        "m": m,
        "matching": [list(e) for e in matching.edges],
        "bound": bound,
        "oracle_max": result.size,
        "ok": result.size <= bound,
        "witness": {
            "color": result.color,
            "rows": list(result.row_indices),
            "cols": list(result.col_indices),
        },
        "balance": float(tt.balance),
        "balanced": min(len(tt.x1_vars), len(tt.x2_vars)) >= n // 2,
        "protocol_rounds_floor": protocol_rounds_floor,
    }


GI_FORMS = ("x&y", "x&~y", "~x&y", "x|y")


def gi_decomposition(
    g: Graph,
    partition: tuple[Sequence[int], Sequence[int]],
    residual: Mapping[int, int],
) -> list[tuple[tuple[int, int], str]]:
    """Per-matching-edge residual form of the inner product's edge terms.

    After fixing every non-matched vertex, the contribution of a matched
    pair (x, y) collapses to one of four two-variable functions, selected
    by the parities of the 1-assigned neighbors on each side.  The
    ``residual`` assignment must cover all non-matched vertices.
    """
    matching = induced_matching(g, partition)
    eps = matching.endpoints()
    rest = set(g.vertices) - eps
    missing = rest - set(residual)
    if missing:
        raise RectangleLabError(
            f"residual assignment misses vertices {sorted(missing)}"
        )
    out = []
    for x, y in matching.edges:
        px = 0
        for w in g.adj[x]:
            if w != y:
                px ^= residual[w]
        py = 0
        for w in g.adj[y]:
            if w != x:
                py ^= residual[w]
        form = {
            (0, 0): "x&y",
            (1, 0): "x&~y",
            (0, 1): "~x&y",
            (1, 1): "x|y",
        }[(px, py)]
        out.append(((x, y), form))
    return out
