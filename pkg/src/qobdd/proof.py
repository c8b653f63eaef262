"""Derivation traces over OBDD lines, and an independent replay checker.

A trace is pure syntax: rule applications referring to earlier line ids.
The checker rebuilds every line in a fresh manager, so accepting a trace
never trusts the producer's diagrams.  Rules:

* ``A i``     -- axiom, the OBDD of matrix clause i (lines 1..m, in order);
* ``C j k``   -- conjunction of lines j and k;
* ``P x j``   -- existential projection of x out of line j (plain
  weakening, so x need not occur in line j);
* ``U x c j`` -- universal reduction: substitute constant c for x, which
  must be universal and rightmost in the prefix among line j's variables;
* ``E j.. 0`` -- entailment, with the claimed OBDD embedded as a block
  (the only rule whose conclusion is not determined by its premises).

A trace refutes its formula when the last line denotes the constant 0.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Union

from . import obdd
from .obdd import BlockFormatError, BudgetExceededError, Manager, OrderError, VarOrder
from .pcnf import Pcnf, emit_qdimacs

DEFAULT_CHECK_BUDGET = 10**7

# rejection reason codes
HASH_MISMATCH = "formula-hash-mismatch"
ORDER_MISMATCH = "order-mismatch"
AXIOM_MISMATCH = "axiom-mismatch"
BAD_REFERENCE = "bad-reference"
URED_NOT_UNIVERSAL = "ured-not-universal"
URED_NOT_RIGHTMOST = "ured-not-rightmost"
ENTAILMENT_FAILED = "entailment-failed"
BUDGET_EXCEEDED = "budget-exceeded"
MALFORMED_BLOCK = "malformed-block"
NOT_REFUTATION = "not-a-refutation"
TRUNCATED = "truncated"
MALFORMED = "malformed"


class TraceError(Exception):
    pass


class TraceParseError(TraceError):
    def __init__(self, message: str, reason: str = MALFORMED):
        super().__init__(message)
        self.reason = reason


@dataclass(frozen=True)
class Axiom:
    clause_index: int  # 1-based index into the matrix


@dataclass(frozen=True)
class Conj:
    left: int
    right: int


@dataclass(frozen=True)
class Proj:
    var: int
    premise: int


@dataclass(frozen=True)
class URed:
    var: int
    value: int
    premise: int


@dataclass(frozen=True)
class Entail:
    premises: tuple[int, ...]
    block: str


Rule = Union[Axiom, Conj, Proj, URed, Entail]


@dataclass(frozen=True)
class ProofLine:
    id: int
    rule: Rule


@dataclass(frozen=True)
class ProofTrace:
    formula_hash: str
    order: VarOrder
    lines: tuple[ProofLine, ...]

    def referenced(self, rule: Rule) -> tuple[int, ...]:
        if isinstance(rule, Conj):
            return (rule.left, rule.right)
        if isinstance(rule, Proj):
            return (rule.premise,)
        if isinstance(rule, URed):
            return (rule.premise,)
        if isinstance(rule, Entail):
            return rule.premises
        return ()


def formula_hash(f: Pcnf) -> str:
    return hashlib.sha256(emit_qdimacs(f).encode()).hexdigest()


# -- verdicts ------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    line: int | None = None
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.accepted


@dataclass
class CheckResult:
    verdict: Verdict
    manager: Manager | None = None
    functions: dict[int, int] | None = None  # line id -> node ref
    last_ref: int | None = None

    @property
    def accepted(self) -> bool:
        return self.verdict.accepted

    @property
    def refutation(self) -> bool:
        return self.accepted and self.last_ref == Manager.ZERO


def check_trace(
    f: Pcnf,
    trace: ProofTrace,
    node_budget: int = DEFAULT_CHECK_BUDGET,
    require_refutation: bool = False,
) -> CheckResult:
    """Replay a trace against its formula in a fresh manager.

    Returns an accepting result carrying the replayed line functions, or a
    rejection naming the offending line and a reason code.
    """

    def reject(line_id: int | None, reason: str) -> CheckResult:
        return CheckResult(Verdict(False, line_id, reason))

    if trace.formula_hash != formula_hash(f):
        return reject(None, HASH_MISMATCH)
    if set(trace.order.vars) != set(f.variables):
        return reject(None, ORDER_MISMATCH)
    mgr = Manager(trace.order, node_budget=node_budget)
    funcs: dict[int, int] = {}
    m = len(f.clauses)
    last_id = 0
    ref = mgr.ONE
    try:
        for pos, line in enumerate(trace.lines):
            if line.id <= last_id:
                return reject(line.id, BAD_REFERENCE)
            rule = line.rule
            if pos < m:
                if not isinstance(rule, Axiom) or rule.clause_index != pos + 1:
                    return reject(line.id, AXIOM_MISMATCH)
            elif isinstance(rule, Axiom):
                return reject(line.id, AXIOM_MISMATCH)
            for j in trace.referenced(rule):
                if j not in funcs:
                    return reject(line.id, BAD_REFERENCE)
            if isinstance(rule, Axiom):
                ref = mgr.clause(f.clauses[rule.clause_index - 1])
            elif isinstance(rule, Conj):
                ref = mgr.apply(funcs[rule.left], funcs[rule.right], "and")
            elif isinstance(rule, Proj):
                if rule.var not in trace.order:
                    return reject(line.id, BAD_REFERENCE)
                ref = mgr.exists(funcs[rule.premise], rule.var)
            elif isinstance(rule, URed):
                if rule.var not in trace.order:
                    return reject(line.id, BAD_REFERENCE)
                if not f.is_universal(rule.var):
                    return reject(line.id, URED_NOT_UNIVERSAL)
                support = mgr.support(funcs[rule.premise])
                if rule.var not in support or any(
                    f.prefix_position(v) > f.prefix_position(rule.var)
                    for v in support
                ):
                    return reject(line.id, URED_NOT_RIGHTMOST)
                ref = mgr.restrict(funcs[rule.premise], rule.var, rule.value)
            elif isinstance(rule, Entail):
                try:
                    claimed = obdd.deserialize(rule.block, mgr)
                except (BlockFormatError, OrderError):
                    return reject(line.id, MALFORMED_BLOCK)
                conj = mgr.ONE
                for j in rule.premises:
                    conj = mgr.apply(conj, funcs[j], "and")
                if mgr.apply(conj, claimed, "implies") != mgr.ONE:
                    return reject(line.id, ENTAILMENT_FAILED)
                ref = claimed
            else:
                return reject(line.id, MALFORMED)
            funcs[line.id] = ref
            last_id = line.id
    except BudgetExceededError:
        return reject(last_id, BUDGET_EXCEEDED)
    if len(trace.lines) < m:
        # every derivation opens with one axiom per matrix clause
        return reject(last_id if trace.lines else None, AXIOM_MISMATCH)
    if not trace.lines:
        return reject(None, MALFORMED)
    if require_refutation and ref != mgr.ZERO:
        return reject(last_id, NOT_REFUTATION)
    return CheckResult(Verdict(True), mgr, funcs, ref)


def is_refutation(f: Pcnf, trace: ProofTrace) -> bool:
    """Whether the trace is an accepted derivation of the constant 0."""
    result = check_trace(f, trace)
    return result.accepted and result.refutation


# -- text format ----------------------------------------------------------
#
#   p qobdd-trace <nvars> <nlines>
#   h <formula-sha256>
#   o <v1> ... <vn>
#   <id> A <clause-index>
#   <id> C <j> <k>
#   <id> P <var> <j>
#   <id> U <var> <0|1> <j>
#   <id> E <j1> ... <jk> 0
#   <ObddBlock for the preceding E line>


def emit_trace(trace: ProofTrace) -> str:
    out = [f"p qobdd-trace {len(trace.order)} {len(trace.lines)}"]
    out.append(f"h {trace.formula_hash}")
    out.append("o " + " ".join(str(v) for v in trace.order.vars))
    for line in trace.lines:
        r = line.rule
        if isinstance(r, Axiom):
            out.append(f"{line.id} A {r.clause_index}")
        elif isinstance(r, Conj):
            out.append(f"{line.id} C {r.left} {r.right}")
        elif isinstance(r, Proj):
            out.append(f"{line.id} P {r.var} {r.premise}")
        elif isinstance(r, URed):
            out.append(f"{line.id} U {r.var} {r.value} {r.premise}")
        elif isinstance(r, Entail):
            out.append(f"{line.id} E " + " ".join(str(j) for j in r.premises) + " 0")
            out.append(r.block)
        else:
            raise TraceError(f"unknown rule {r!r}")
    return "\n".join(out) + "\n"


def parse_trace(text: str) -> ProofTrace:
    lines = text.splitlines()
    idx = 0

    def next_line() -> str:
        nonlocal idx
        while idx < len(lines):
            ln = lines[idx].strip()
            idx += 1
            if ln and not ln.startswith("c "):
                return ln
        raise TraceParseError("unexpected end of trace", TRUNCATED)

    head = next_line().split()
    if len(head) != 4 or head[0] != "p" or head[1] != "qobdd-trace":
        raise TraceParseError(f"bad trace header {' '.join(head)!r}")
    try:
        nvars, nlines = int(head[2]), int(head[3])
    except ValueError:
        raise TraceParseError("bad trace header counts") from None
    hline = next_line().split()
    if len(hline) != 2 or hline[0] != "h":
        raise TraceParseError("missing formula hash line")
    oline = next_line().split()
    if len(oline) != nvars + 1 or oline[0] != "o":
        raise TraceParseError("bad order line")
    try:
        order = VarOrder(int(v) for v in oline[1:])
    except (ValueError, OrderError) as exc:
        raise TraceParseError(f"bad order line: {exc}") from None

    proof_lines: list[ProofLine] = []
    for _ in range(nlines):
        parts = next_line().split()
        if len(parts) < 2:
            raise TraceParseError(f"bad trace line {' '.join(parts)!r}")
        try:
            lid = int(parts[0])
            tag = parts[1]
            if tag == "A" and len(parts) == 3:
                rule: Rule = Axiom(int(parts[2]))
            elif tag == "C" and len(parts) == 4:
                rule = Conj(int(parts[2]), int(parts[3]))
            elif tag == "P" and len(parts) == 4:
                rule = Proj(int(parts[2]), int(parts[3]))
            elif tag == "U" and len(parts) == 5:
                value = int(parts[3])
                if value not in (0, 1):
                    raise TraceParseError(f"bad reduction constant {parts[3]!r}")
                rule = URed(int(parts[2]), value, int(parts[4]))
            elif tag == "E" and len(parts) >= 3 and parts[-1] == "0":
                premises = tuple(int(p) for p in parts[2:-1])
                blk_head = next_line().split()
                if len(blk_head) != 2 or blk_head[0] != "obdd":
                    raise TraceParseError("entailment line without block")
                k = int(blk_head[1])
                blk = [f"obdd {k}"]
                for _ in range(k):
                    blk.append(next_line())
                rule = Entail(premises, "\n".join(blk))
            else:
                raise TraceParseError(f"bad trace line {' '.join(parts)!r}")
        except ValueError:
            raise TraceParseError(f"bad trace line {' '.join(parts)!r}") from None
        proof_lines.append(ProofLine(lid, rule))
    while idx < len(lines):
        if lines[idx].strip() and not lines[idx].startswith("c "):
            raise TraceParseError("trailing content after declared lines")
        idx += 1
    return ProofTrace(hline[1], order, tuple(proof_lines))
