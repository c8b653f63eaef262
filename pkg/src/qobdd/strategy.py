"""Universal winning strategies as per-variable OBDD decision lists.

From a checked refutation, a single scan of its lines builds one decision
list per universal variable u: for every reduction line L_i = L_j[u/c],
the pair (not L_i, c) is appended, and a constant-true guard with value 1
closes the list.  Guards are references into the checker's manager, so the
scan is linear in the trace length.

A guard built this way only mentions variables left of u in the prefix, so
responses can be computed one universal at a time, outermost first, and
the strategy is a well-defined function of the existential assignment.

The second half of this module converts decision lists into rectangle
decision lists over a prefix/suffix variable split, and runs the
two-player conjunction protocol that evaluates them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from . import obdd
from .obdd import CompleteObdd, Manager, VarOrder
from .pcnf import FORALL, Pcnf
from .proof import CheckResult, ProofTrace, URed, check_trace


class StrategyError(Exception):
    pass


@dataclass
class DecisionList:
    """First-match (guard, bit) pairs; the last guard is constant true."""

    manager: Manager
    entries: list[tuple[int, int]]  # (guard ref, value)

    def __post_init__(self):
        if not self.entries or self.entries[-1][0] != self.manager.ONE:
            raise StrategyError("decision list must end in a constant-true guard")

    def __len__(self) -> int:
        return len(self.entries)

    def evaluate(self, assignment: Mapping[int, int]) -> int:
        for guard, value in self.entries:
            if self.manager.evaluate(guard, assignment):
                return value
        raise AssertionError("unreachable: terminal guard is constant true")

    def support(self) -> set[int]:
        out: set[int] = set()
        for guard, _ in self.entries:
            out |= self.manager.support(guard)
        return out

    def guard_sizes(self) -> list[int]:
        return [self.manager.size(g) for g, _ in self.entries]

    def width_bound(self) -> int:
        """Largest complete width over the guards."""
        return max(self.manager.complete(g).width for g, _ in self.entries)


@dataclass
class DecisionListFamily:
    formula: Pcnf
    manager: Manager
    lists: dict[int, DecisionList]

    def audit(self) -> None:
        """Each guard may only mention variables left of its universal."""
        for u, dl in self.lists.items():
            allowed = set(self.formula.left_of(u))
            extra = dl.support() - allowed
            if extra:
                raise StrategyError(
                    f"guards for {u} depend on non-preceding variables {sorted(extra)}"
                )

    def respond(self, tau: Mapping[int, int]) -> dict[int, int]:
        """Extend an existential assignment with the strategy's responses."""
        full = dict(tau)
        for q, v in self.formula.prefix:
            if q == FORALL:
                full[v] = self.lists[v].evaluate(full)
        return full


def extract(
    f: Pcnf, trace: ProofTrace, check: CheckResult | None = None
) -> DecisionListFamily:
    """Decision lists from a refutation, in one pass over its lines."""
    if check is None:
        check = check_trace(f, trace, require_refutation=True)
    if not check.accepted:
        v = check.verdict
        raise StrategyError(f"trace rejected at line {v.line}: {v.reason}")
    if not check.refutation:
        raise StrategyError("strategy extraction needs a refutation")
    mgr = check.manager
    assert mgr is not None and check.functions is not None
    pairs: dict[int, list[tuple[int, int]]] = {u: [] for u in f.universals}
    for line in trace.lines:
        if isinstance(line.rule, URed):
            guard = mgr.negate(check.functions[line.id])
            pairs[line.rule.var].append((guard, line.rule.value))
    lists = {
        u: DecisionList(mgr, entries + [(mgr.ONE, 1)])
        for u, entries in pairs.items()
    }
    family = DecisionListFamily(f, mgr, lists)
    family.audit()
    return family


def eval_list(dl: DecisionList, assignment: Mapping[int, int]) -> int:
    return dl.evaluate(assignment)


def respond(family: DecisionListFamily, tau: Mapping[int, int]) -> dict[int, int]:
    return family.respond(tau)


@dataclass(frozen=True)
class WinningVerdict:
    winning: bool
    counterexample: dict[int, int] | None
    checked: int
    exhaustive: bool

    def __bool__(self) -> bool:
        return self.winning


def _matrix_satisfied(f: Pcnf, assignment: Mapping[int, int]) -> bool:
    return all(
        any((lit > 0) == bool(assignment[abs(lit)]) for lit in c) for c in f.clauses
    )


def verify_winning(
    f: Pcnf,
    family: DecisionListFamily,
    exhaustive_limit: int = 16,
    samples: int = 100000,
    seed: int = 0,
) -> WinningVerdict:
    """Does the family falsify the matrix against every existential play?

    Exhaustive when the existential count is within ``exhaustive_limit``,
    sampled otherwise.  A counterexample is reported in the verdict, never
    raised.
    """
    family.audit()
    evars = f.existentials
    exhaustive = len(evars) <= exhaustive_limit
    if exhaustive:
        space: Iterable[int] = range(1 << len(evars))
        total = 1 << len(evars)
    else:
        rng = random.Random(seed)
        space = (rng.getrandbits(len(evars)) for _ in range(samples))
        total = samples
    checked = 0
    for bits in space:
        tau = {v: (bits >> i) & 1 for i, v in enumerate(evars)}
        full = family.respond(tau)
        checked += 1
        if _matrix_satisfied(f, full):
            return WinningVerdict(False, full, checked, exhaustive)
    return WinningVerdict(True, None, total, exhaustive)


def strategy_range_size(family: DecisionListFamily, exhaustive_limit: int = 20) -> int:
    """Number of distinct universal response vectors across existential plays.

    Responses only depend on existential variables appearing in some guard,
    so enumeration runs over that subset; the limit bounds its size.
    """
    family.audit()
    f = family.formula
    existential = set(f.existentials)
    relevant = sorted(
        {v for dl in family.lists.values() for v in dl.support() if v in existential}
    )
    if len(relevant) > exhaustive_limit:
        raise StrategyError(
            f"{len(relevant)} relevant existentials exceed limit {exhaustive_limit}"
        )
    other = [v for v in f.existentials if v not in relevant]
    fill = {v: 0 for v in other}
    universals = f.universals
    seen: set[tuple[int, ...]] = set()
    for bits in range(1 << len(relevant)):
        tau = {v: (bits >> i) & 1 for i, v in enumerate(relevant)}
        tau.update(fill)
        full = family.respond(tau)
        seen.add(tuple(full[u] for u in universals))
    return len(seen)


# -- rectangles ------------------------------------------------------------


@dataclass
class Rectangle:
    """Product function r1(X1) and r2(X2) over a two-block variable split.

    Halves live in the owning manager; explicit model sets are materialized
    on demand for sides of at most ``MODEL_LIMIT`` variables.
    """

    MODEL_LIMIT = 20

    manager: Manager
    x1_vars: tuple[int, ...]
    x2_vars: tuple[int, ...]
    r1: int
    r2: int

    def evaluate(self, assignment: Mapping[int, int]) -> int:
        return self.manager.evaluate(self.r1, assignment) & self.manager.evaluate(
            self.r2, assignment
        )

    def as_ref(self) -> int:
        return self.manager.apply(self.r1, self.r2, "and")

    def _models(self, ref: int, side: tuple[int, ...]) -> frozenset[int]:
        if len(side) > self.MODEL_LIMIT:
            raise StrategyError(
                f"model sets limited to {self.MODEL_LIMIT}-variable sides"
            )
        out = set()
        for bits in range(1 << len(side)):
            a = {v: (bits >> i) & 1 for i, v in enumerate(side)}
            if self.manager.evaluate(ref, a):
                out.add(bits)
        return frozenset(out)

    def models_left(self) -> frozenset[int]:
        return self._models(self.r1, self.x1_vars)

    def models_right(self) -> frozenset[int]:
        return self._models(self.r2, self.x2_vars)

    @property
    def balance(self) -> Fraction:
        total = len(self.x1_vars) + len(self.x2_vars)
        if total == 0:
            return Fraction(0)
        return Fraction(min(len(self.x1_vars), len(self.x2_vars)), total)


def obdd_to_rectangles(complete: CompleteObdd, cut: int) -> list[Rectangle]:
    """Rectangle cover of a complete diagram along a prefix cut.

    One rectangle per live node in the cut layer: its left half accepts the
    prefix assignments reaching the node, its right half is the node's own
    function on the remaining variables.  The disjunction of the rectangles
    is the original function and their number is at most the width.
    Degenerate cuts (0 or all variables) give one-sided full rectangles.
    """
    mgr = complete.manager
    n = len(complete.vars)
    if not 0 <= cut <= n:
        raise StrategyError(f"cut {cut} not a prefix length of the order")
    x1 = complete.vars[:cut]
    x2 = complete.vars[cut:]
    states = complete.states_at(cut)

    # reach_i(s): over X1, whether the first i choices lead to state s
    memo: dict[tuple[int, int], int] = {}

    def reach(layer: int, state: int, target: int) -> int:
        if layer == cut:
            return mgr.ONE if state == target else mgr.ZERO
        key = (layer, state)
        if key in memo:
            return memo[key]
        lo, hi = complete.transitions[layer][state]
        rlo = reach(layer + 1, lo, target)
        rhi = reach(layer + 1, hi, target)
        res = rlo if rlo == rhi else mgr.node(complete.vars[layer], rlo, rhi)
        memo[key] = res
        return res

    rects = []
    for s in states:
        if s == mgr.ZERO:
            continue  # contributes nothing to the disjunction
        memo.clear()
        r1 = reach(0, complete.root, s)
        rects.append(Rectangle(mgr, x1, x2, r1, s))
    return rects


@dataclass
class RectangleDecisionList:
    """First-match rectangles sharing one partition; last entry is full."""

    entries: list[tuple[Rectangle, int]]

    def __post_init__(self):
        if not self.entries:
            raise StrategyError("empty rectangle decision list")
        last = self.entries[-1][0]
        if last.r1 != last.manager.ONE or last.r2 != last.manager.ONE:
            raise StrategyError("terminal rectangle must be full")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def partition(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        r = self.entries[0][0]
        return r.x1_vars, r.x2_vars

    def evaluate(self, assignment: Mapping[int, int]) -> int:
        for rect, value in self.entries:
            if rect.evaluate(assignment):
                return value
        raise AssertionError("unreachable: terminal rectangle is full")


def to_rectangle_list(dl: DecisionList, cut: int) -> RectangleDecisionList:
    """Expand each guard into its cut rectangles, preserving order and values.

    For a list of length s whose guards have complete width at most w, the
    result has length at most w*(s-1) + 1 and computes the same function.
    """
    mgr = dl.manager
    entries: list[tuple[Rectangle, int]] = []
    for guard, value in dl.entries[:-1]:
        for rect in obdd_to_rectangles(mgr.complete(guard), cut):
            entries.append((rect, value))
    x1 = mgr.order.vars[:cut]
    x2 = mgr.order.vars[cut:]
    terminal = Rectangle(mgr, x1, x2, mgr.ONE, mgr.ONE)
    entries.append((terminal, dl.entries[-1][1]))
    return RectangleDecisionList(entries)


@dataclass(frozen=True)
class ProtocolRun:
    value: int
    rounds: int


def and_protocol_run(
    rdl: RectangleDecisionList,
    a1: Mapping[int, int],
    a2: Mapping[int, int],
) -> ProtocolRun:
    """Two players evaluate the list; a referee broadcasts bit conjunctions.

    Each round the left player sends r1(a1) and the right player r2(a2) for
    the current rectangle; the first round whose conjunction is 1 fixes the
    output.  The round count is the index of the first firing rectangle.
    """
    x1_vars, x2_vars = rdl.partition
    if not set(x1_vars) <= set(a1) or not set(x2_vars) <= set(a2):
        raise StrategyError("assignments do not cover their partition sides")
    mgr = rdl.entries[0][0].manager
    for rounds, (rect, value) in enumerate(rdl.entries, start=1):
        b1 = mgr.evaluate(rect.r1, a1)
        b2 = mgr.evaluate(rect.r2, a2)
        if b1 & b2:
            return ProtocolRun(value, rounds)
    raise AssertionError("unreachable: terminal rectangle is full")


# -- strategy files ---------------------------------------------------------
#
#   p qobdd-strategy
#   u <var> <s>
#   entry <bit>
#   <ObddBlock>          (one per entry, guard of that entry)
#   ...


def emit_strategy(family: DecisionListFamily) -> str:
    out = ["p qobdd-strategy"]
    for u in family.formula.universals:
        dl = family.lists[u]
        out.append(f"u {u} {len(dl)}")
        for guard, value in dl.entries:
            out.append(f"entry {value}")
            out.append(obdd.serialize(family.manager, guard))
    return "\n".join(out) + "\n"


def _infer_order(blocks: list[str], extra_vars: Iterable[int]) -> VarOrder:
    """Topological order consistent with every block's parent/child pairs."""
    constraints: set[tuple[int, int]] = set()
    vars_seen: set[int] = set(extra_vars)
    for blk in blocks:
        constraints |= obdd.block_order_constraints(blk)
        vars_seen |= obdd.block_variables(blk)
    succ: dict[int, set[int]] = {v: set() for v in vars_seen}
    indeg: dict[int, int] = {v: 0 for v in vars_seen}
    for a, b in constraints:
        if b not in succ[a]:
            succ[a].add(b)
            indeg[b] += 1
    ready = sorted(v for v in vars_seen if indeg[v] == 0)
    out: list[int] = []
    while ready:
        v = ready.pop(0)
        out.append(v)
        for w in sorted(succ[v]):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
        ready.sort()
    if len(out) != len(vars_seen):
        raise StrategyError("strategy guards admit no common variable order")
    return VarOrder(out)


def parse_strategy(text: str, f: Pcnf) -> DecisionListFamily:
    lines = [ln for ln in text.splitlines()]
    idx = 0

    def next_line() -> str:
        nonlocal idx
        while idx < len(lines):
            ln = lines[idx].strip()
            idx += 1
            if ln and not ln.startswith("c "):
                return ln
        raise StrategyError("unexpected end of strategy file")

    if next_line() != "p qobdd-strategy":
        raise StrategyError("bad strategy header")
    raw: dict[int, list[tuple[int, str]]] = {}
    all_blocks: list[str] = []
    try:
        while True:
            try:
                head = next_line()
            except StrategyError:
                break
            parts = head.split()
            if len(parts) != 3 or parts[0] != "u":
                raise StrategyError(f"expected `u <var> <s>`, got {head!r}")
            var, count = int(parts[1]), int(parts[2])
            entries: list[tuple[int, str]] = []
            for _ in range(count):
                eparts = next_line().split()
                if len(eparts) != 2 or eparts[0] != "entry":
                    raise StrategyError("expected `entry <bit>`")
                value = int(eparts[1])
                blk_head = next_line().split()
                if len(blk_head) != 2 or blk_head[0] != "obdd":
                    raise StrategyError("entry without diagram block")
                k = int(blk_head[1])
                blk_lines = [f"obdd {k}"] + [next_line() for _ in range(k)]
                blk = "\n".join(blk_lines)
                entries.append((value, blk))
                all_blocks.append(blk)
            raw[var] = entries
    except ValueError as exc:
        raise StrategyError(f"bad strategy file: {exc}") from None
    if set(raw) != set(f.universals):
        raise StrategyError("strategy file does not cover the universal variables")
    order = _infer_order(all_blocks, f.variables)
    mgr = Manager(order)
    lists = {}
    for var, entries in raw.items():
        decoded = [(obdd.deserialize(blk, mgr), value) for value, blk in entries]
        lists[var] = DecisionList(mgr, decoded)
    family = DecisionListFamily(f, mgr, lists)
    family.audit()
    return family
