"""Symbolic quantifier elimination by bucket processing, with trace output.

Clause diagrams are grouped into buckets by their rightmost prefix
variable.  Variables are eliminated innermost-first: conjoin the bucket,
quantify the variable out, and drop the result into the bucket of its new
rightmost variable.  Reaching the constant 0 anywhere ends the run with
FALSE and a derivation of 0; surviving every elimination means TRUE.

Every step is logged as a trace line: conjunctions directly, existential
elimination as a projection, and universal elimination as two constant
substitutions joined by a conjunction (for a rightmost variable x,
forall x. L  =  L[x/0] and L[x/1], so the log stays within the checker's
rule set).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .graphs import order_from_decomposition, path_decomposition
from .obdd import BudgetExceededError, Manager, VarOrder
from .pcnf import EXISTS, Pcnf, primal_graph
from .proof import Axiom, Conj, Proj, ProofLine, ProofTrace, URed, formula_hash

DEFAULT_NODE_BUDGET = 10**7


class ResourceBudgetError(Exception):
    """Raised when a solve runs out of its node budget; never a verdict."""


def tower(a: int, q: int, max_bits: int = 64) -> int | None:
    """Iterated exponential: tower(a, 1) = a, tower(a, q+1) = 2**tower(a, q).

    Returns None once the value no longer fits in ``max_bits`` bits.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    val = a
    for _ in range(q - 1):
        if val > max_bits:
            return None
        val = 2**val
    return val if val.bit_length() <= max_bits else None


@dataclass
class SolveStats:
    value: bool | None = None
    max_width: int = 0
    widths: list[int] = field(default_factory=list)  # complete width per line
    trace_nodes: int = 0  # sum of line diagram sizes
    line_count: int = 0
    eliminations: list[dict] = field(default_factory=list)
    wall_time_ms: float = 0.0

    def as_dict(self, with_timing: bool = True) -> dict:
        out = {
            "value": self.value,
            "max_width": self.max_width,
            "trace_nodes": self.trace_nodes,
            "lines": self.line_count,
            "eliminations": len(self.eliminations),
        }
        if with_timing:
            out["wall_time_ms"] = round(self.wall_time_ms, 3)
        return out


@dataclass
class SolveResult:
    value: bool
    trace: ProofTrace | None
    stats: SolveStats
    order: VarOrder


def default_order(f: Pcnf) -> VarOrder:
    """Order from a heuristic path decomposition of the primal graph.

    Prefix variables missing from the matrix are appended at the end.
    """
    g = primal_graph(f)
    ordered = list(order_from_decomposition(path_decomposition(g)).vars)
    present = set(ordered)
    ordered += [v for v in f.variables if v not in present]
    return VarOrder(ordered)


def prefix_order(f: Pcnf) -> VarOrder:
    return VarOrder(f.variables)


def bucket_of(f: Pcnf, manager: Manager, ref: int) -> int | None:
    """Prefix position of the diagram's rightmost variable; None if constant."""
    support = manager.support(ref)
    if not support:
        return None
    return max(f.prefix_position(v) for v in support)


def bucket_init(
    f: Pcnf, manager: Manager
) -> tuple[list[list[tuple[int, int]]], list[ProofLine], dict[int, int], bool]:
    """Axiom lines and initial buckets of (ref, line id) pairs.

    Returns (buckets, lines, line functions, early_false) where early_false
    signals an empty input clause.
    """
    buckets: list[list[tuple[int, int]]] = [[] for _ in f.prefix]
    lines: list[ProofLine] = []
    funcs: dict[int, int] = {}
    early_false = False
    seen_per_bucket: list[set[int]] = [set() for _ in f.prefix]
    for i, c in enumerate(f.clauses, start=1):
        ref = manager.clause(c)
        lid = len(lines) + 1
        lines.append(ProofLine(lid, Axiom(i)))
        funcs[lid] = ref
        if ref == manager.ZERO:
            early_false = True
            continue
        if ref == manager.ONE:
            continue
        pos = bucket_of(f, manager, ref)
        assert pos is not None
        if ref not in seen_per_bucket[pos]:
            seen_per_bucket[pos].add(ref)
            buckets[pos].append((ref, lid))
    return buckets, lines, funcs, early_false


def solve(
    f: Pcnf,
    order: VarOrder | None = None,
    emit_trace: bool = True,
    node_budget: int = DEFAULT_NODE_BUDGET,
    collect_widths: bool = True,
) -> SolveResult:
    """Decide the PCNF formula; FALSE runs yield a checkable refutation.

    TRUE runs still return their derivation log (never a refutation).
    Exceeding the node budget raises ``ResourceBudgetError``.
    """
    start = time.perf_counter()
    if order is None:
        order = default_order(f)
    if set(order.vars) != set(f.variables):
        raise ValueError("order must cover exactly the formula variables")
    mgr = Manager(order, node_budget=node_budget)
    stats = SolveStats()

    try:
        buckets, lines, funcs, early_false = bucket_init(f, mgr)
        for lid in range(1, len(lines) + 1):
            _record(stats, mgr, funcs[lid], collect_widths)

        def emit(rule, ref) -> int:
            lid = len(lines) + 1
            lines.append(ProofLine(lid, rule))
            funcs[lid] = ref
            _record(stats, mgr, ref, collect_widths)
            return lid

        value: bool | None = None
        if early_false:
            empty_lid = next(
                lid for lid, r in funcs.items() if r == mgr.ZERO
            )
            emit(Conj(empty_lid, empty_lid), mgr.ZERO)
            value = False

        if value is None:
            value = _eliminate_all(f, mgr, buckets, emit, stats)
    except BudgetExceededError as exc:
        raise ResourceBudgetError(str(exc)) from exc

    stats.value = value
    stats.wall_time_ms = (time.perf_counter() - start) * 1000.0
    trace = None
    if emit_trace:
        trace = ProofTrace(formula_hash(f), order, tuple(lines))
    return SolveResult(value, trace, stats, order)


def saturation_report(stats_by_n: dict[int, SolveStats]) -> dict:
    """Compare max intermediate widths across instance sizes of one family.

    A family whose width column is constant solves in time linear in the
    trace length regardless of n; ``saturated`` reports that observation.
    """
    widths = {n: s.max_width for n, s in sorted(stats_by_n.items())}
    values = list(widths.values())
    return {
        "max_width_by_n": widths,
        "saturated": len(set(values)) == 1,
        "peak": max(values) if values else 0,
    }


def _record(stats: SolveStats, mgr: Manager, ref: int, collect_widths: bool) -> None:
    stats.line_count += 1
    stats.trace_nodes += mgr.size(ref)
    if collect_widths:
        w = mgr.complete(ref).width
        stats.widths.append(w)
        stats.max_width = max(stats.max_width, w)


def _eliminate_all(f, mgr, buckets, emit, stats) -> bool:
    for pos in range(len(f.prefix) - 1, -1, -1):
        entries = buckets[pos]
        if not entries:
            continue
        q, var = f.prefix[pos]
        entries.sort(key=lambda e: (mgr.size(e[0]), e[1]))
        ref, lid = entries[0]
        for nxt_ref, nxt_lid in entries[1:]:
            ref = mgr.apply(ref, nxt_ref, "and")
            lid = emit(Conj(lid, nxt_lid), ref)
            if ref == mgr.ZERO:
                return False
        step = {"var": var, "quantifier": q, "bucket_size": len(entries)}
        if var in mgr.support(ref):
            if q == EXISTS:
                ref = mgr.exists(ref, var)
                lid = emit(Proj(var, lid), ref)
            else:
                r0 = mgr.restrict(ref, var, 0)
                lid0 = emit(URed(var, 0, lid), r0)
                r1 = mgr.restrict(ref, var, 1)
                lid1 = emit(URed(var, 1, lid), r1)
                ref = mgr.apply(r0, r1, "and")
                lid = emit(Conj(lid0, lid1), ref)
        step["result_size"] = mgr.size(ref)
        stats.eliminations.append(step)
        if ref == mgr.ZERO:
            return False
        if ref == mgr.ONE:
            continue
        new_pos = max(f.prefix_position(v) for v in mgr.support(ref))
        assert new_pos < pos
        buckets[new_pos].append((ref, lid))
    return True
