"""Shared oracles and generators for the test suite.

Everything here is deliberately independent of the code paths it checks:
truth tables come from exhaustive evaluation, widths from cofactor
counting, rectangle maxima from double-subset enumeration, and PCNF truth
values from the game-tree recursion in qobdd.bruteforce.
"""

from __future__ import annotations

import random
from itertools import product

from qobdd.obdd import Manager
from qobdd.pcnf import EXISTS, FORALL, Pcnf, clause


def assignments(variables):
    """All assignments of the given variables, as dicts."""
    for bits in product((0, 1), repeat=len(variables)):
        yield dict(zip(variables, bits))


def truth_table_of(mgr: Manager, ref: int, variables) -> tuple[int, ...]:
    return tuple(mgr.evaluate(ref, a) for a in assignments(variables))


def obdd_from_table(mgr: Manager, variables, table) -> int:
    """Shannon expansion of an explicit truth table, topmost variable first.

    ``table`` lists f over assignments in ``assignments(variables)`` order,
    i.e. the first variable is the most significant index bit.
    """
    memo: dict[tuple, int] = {}

    def build(vs, tab):
        if not vs:
            return mgr.const(tab[0])
        key = (len(vs), tab)
        if key in memo:
            return memo[key]
        half = len(tab) // 2
        lo = build(vs[1:], tab[:half])
        hi = build(vs[1:], tab[half:])
        res = lo if lo == hi else mgr.node(vs[0], lo, hi)
        memo[key] = res
        return res

    return build(tuple(variables), tuple(table))


def random_table(rng: random.Random, nvars: int) -> tuple[int, ...]:
    return tuple(rng.randint(0, 1) for _ in range(1 << nvars))


def cofactor_counts(mgr: Manager, ref: int) -> list[int]:
    """Distinct-subfunction count per layer, by exhaustive evaluation.

    Independent oracle for complete-OBDD widths: for each prefix length i
    of the manager's order, counts the distinct truth tables of f with the
    first i variables fixed in every possible way.
    """
    order = mgr.order.vars
    counts = []
    for i in range(len(order)):
        prefix, suffix = order[:i], order[i:]
        seen = set()
        for a in assignments(prefix):
            sub = tuple(mgr.evaluate(ref, {**a, **b}) for b in assignments(suffix))
            seen.add(sub)
        counts.append(len(seen))
    return counts


def random_pcnf(rng: random.Random, max_vars=14, max_clauses=30) -> Pcnf:
    """Random small PCNF with 2-4 alternating quantifier blocks."""
    n = rng.randint(3, max_vars)
    nblocks = rng.randint(2, 4)
    q = rng.choice([EXISTS, FORALL])
    cuts = sorted(rng.sample(range(1, n), min(nblocks - 1, n - 1)))
    prefix = []
    b = 0
    for v in range(1, n + 1):
        if b < len(cuts) and v > cuts[b]:
            b += 1
            q = EXISTS if q == FORALL else FORALL
        prefix.append((q, v))
    m = rng.randint(1, max_clauses)
    clauses = []
    for _ in range(m):
        k = rng.randint(1, min(4, n))
        vs = rng.sample(range(1, n + 1), k)
        clauses.append(clause([v if rng.random() < 0.5 else -v for v in vs]))
    return Pcnf(tuple(prefix), tuple(clauses))


def naive_max_mono(rows: tuple[int, ...], ncols: int) -> int:
    """Maximum monochromatic rectangle by double-subset enumeration.

    Every (row subset, column subset) pair is visited; a pair is
    monochromatic when the selected cells are all ones (the AND of the
    selected rows covers the columns) or all zeroes (their OR misses them).
    """
    nrows = len(rows)
    full = (1 << ncols) - 1
    best = 0
    for amask in range(1, 1 << nrows):
        na = amask.bit_count()
        if na * ncols <= best:
            continue
        and_rows, or_rows = full, 0
        for i in range(nrows):
            if amask >> i & 1:
                and_rows &= rows[i]
                or_rows |= rows[i]
        for bmask in range(1, 1 << ncols):
            if bmask & ~and_rows == 0 or bmask & or_rows == 0:
                size = na * bmask.bit_count()
                if size > best:
                    best = size
    return best
