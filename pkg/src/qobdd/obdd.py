"""Reduced ordered binary decision diagrams over a fixed variable order.

A ``Manager`` owns an append-only node store and hands out node references
(plain ints).  Nodes are hash-consed at creation, so the diagram for a given
Boolean function is unique within its manager: structural equality is
reference equality.  The two terminals are ``Manager.ZERO`` and
``Manager.ONE``.

A manager and its references belong to one logical thread at a time; hand a
manager off between threads if you like, but never share one concurrently.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping


class ObddError(Exception):
    pass


class OrderError(ObddError):
    """Variable unknown to the order, or a child outranks its parent."""


class BudgetExceededError(ObddError):
    """The manager's node budget was exhausted."""


class BlockFormatError(ObddError):
    """A serialized OBDD block could not be parsed."""


class VarOrder:
    """An ordering pi of integer variable ids; rank 0 is tested first."""

    __slots__ = ("vars", "position")

    def __init__(self, variables: Iterable[int]):
        self.vars = tuple(variables)
        self.position = {v: i for i, v in enumerate(self.vars)}
        if len(self.position) != len(self.vars):
            raise OrderError("duplicate variable in order")

    def rank(self, var: int) -> int:
        try:
            return self.position[var]
        except KeyError:
            raise OrderError(f"variable {var} not in order") from None

    def __len__(self) -> int:
        return len(self.vars)

    def __contains__(self, var: int) -> bool:
        return var in self.position

    def __iter__(self) -> Iterator[int]:
        return iter(self.vars)

    def __eq__(self, other) -> bool:
        return isinstance(other, VarOrder) and self.vars == other.vars

    def __hash__(self) -> int:
        return hash(self.vars)

    def __repr__(self) -> str:
        return f"VarOrder({list(self.vars)!r})"


# The sixteen binary Boolean operations, encoded as 4-bit truth tables.
# Bit index (a << 1) | b holds op(a, b).
OPS = {
    "false": 0b0000,
    "nor": 0b0001,
    "less": 0b0010,       # ~a & b
    "notleft": 0b0011,    # ~a
    "greater": 0b0100,    # a & ~b
    "notright": 0b0101,   # ~b
    "xor": 0b0110,
    "nand": 0b0111,
    "and": 0b1000,
    "xnor": 0b1001,
    "right": 0b1010,      # b
    "implies": 0b1011,    # a -> b
    "left": 0b1100,       # a
    "impliedby": 0b1101,  # b -> a
    "or": 0b1110,
    "true": 0b1111,
}

OP_NAMES = {code: name for name, code in OPS.items()}


def _op_code(op) -> int:
    if isinstance(op, str):
        try:
            return OPS[op]
        except KeyError:
            raise ValueError(f"unknown binary op {op!r}") from None
    code = int(op)
    if not 0 <= code <= 15:
        raise ValueError(f"op code out of range: {op!r}")
    return code


def _is_symmetric(code: int) -> bool:
    return ((code >> 1) & 1) == ((code >> 2) & 1)


class Manager:
    """Hash-consed OBDD store for one variable order.

    Node references are indices into the store; 0 and 1 are the sinks.  No
    node ever has equal children and no triple is stored twice, so diagrams
    are fully reduced by construction.  There is no garbage collection:
    managers are meant to be short-lived, one per solve or check.
    """

    ZERO = 0
    ONE = 1

    def __init__(self, order: VarOrder, node_budget: int | None = None):
        self.order = order
        self.node_budget = node_budget
        n = len(order)
        self._terminal_rank = n
        # parallel arrays; slots 0/1 are the sinks
        self._var: list[int | None] = [None, None]
        self._lo: list[int] = [-1, -1]
        self._hi: list[int] = [-1, -1]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._apply_cache: dict[tuple[int, int, int], int] = {}
        self._neg_cache: dict[int, int] = {}
        self._restrict_cache: dict[tuple[int, int, int], int] = {}

    # -- basic accessors ---------------------------------------------------

    def __len__(self) -> int:
        return len(self._var)

    def is_terminal(self, ref: int) -> bool:
        self._check_ref(ref)
        return ref <= 1

    def var_of(self, ref: int) -> int | None:
        self._check_ref(ref)
        return self._var[ref]

    def children(self, ref: int) -> tuple[int, int]:
        self._check_ref(ref)
        if ref <= 1:
            raise ObddError("terminals have no children")
        return self._lo[ref], self._hi[ref]

    def rank_of(self, ref: int) -> int:
        """Rank of the ref's root variable; terminals rank past the order."""
        self._check_ref(ref)
        v = self._var[ref]
        return self._terminal_rank if v is None else self.order.position[v]

    def _check_ref(self, ref: int) -> None:
        if not isinstance(ref, int) or not 0 <= ref < len(self._var):
            raise ObddError(f"invalid node reference {ref!r} for this manager")

    # -- construction ------------------------------------------------------

    def const(self, bit: int) -> int:
        return self.ONE if bit else self.ZERO

    def node(self, var: int, lo: int, hi: int) -> int:
        """Canonical node for (var, lo, hi); collapses redundant tests."""
        self._check_ref(lo)
        self._check_ref(hi)
        if lo == hi:
            return lo
        rank = self.order.rank(var)
        if self.rank_of(lo) <= rank or self.rank_of(hi) <= rank:
            raise OrderError(
                f"variable {var} (rank {rank}) does not precede its children"
            )
        key = (var, lo, hi)
        found = self._unique.get(key)
        if found is not None:
            return found
        if self.node_budget is not None and len(self._var) - 2 >= self.node_budget:
            raise BudgetExceededError(
                f"node budget {self.node_budget} exceeded"
            )
        ref = len(self._var)
        self._var.append(var)
        self._lo.append(lo)
        self._hi.append(hi)
        self._unique[key] = ref
        return ref

    def literal(self, var: int, positive: bool = True) -> int:
        if positive:
            return self.node(var, self.ZERO, self.ONE)
        return self.node(var, self.ONE, self.ZERO)

    def clause(self, literals: Iterable[int]) -> int:
        """OBDD of a disjunction of signed DIMACS-style literals."""
        lits = set(literals)
        if any(-l in lits for l in lits):
            return self.ONE  # tautological clause
        acc = self.ZERO
        key = lambda l: self.order.rank(abs(l))
        for lit in sorted(lits, key=key, reverse=True):
            if lit > 0:
                acc = self.node(lit, acc, self.ONE)
            else:
                acc = self.node(-lit, self.ONE, acc)
        return acc

    def cube(self, assignment: Mapping[int, int]) -> int:
        """OBDD of the conjunction of literals fixing each given variable."""
        acc = self.ONE
        for var in sorted(assignment, key=self.order.rank, reverse=True):
            if assignment[var]:
                acc = self.node(var, self.ZERO, acc)
            else:
                acc = self.node(var, acc, self.ZERO)
        return acc

    # -- boolean combination -----------------------------------------------

    def apply(self, f: int, g: int, op) -> int:
        """Combine two diagrams with a binary Boolean operation.

        ``op`` is a name from ``OPS`` or a 4-bit truth-table code.  The
        pairwise recursion is memoized per manager, with argument swapping
        for symmetric operations.
        """
        self._check_ref(f)
        self._check_ref(g)
        return self._apply(_op_code(op), f, g)

    def _apply(self, code: int, f: int, g: int) -> int:
        if f <= 1:
            pair = ((code >> ((f << 1) | 0)) & 1, (code >> ((f << 1) | 1)) & 1)
            return self._unary(pair, g)
        if g <= 1:
            pair = ((code >> ((0 << 1) | g)) & 1, (code >> ((1 << 1) | g)) & 1)
            return self._unary(pair, f)
        if _is_symmetric(code) and f > g:
            f, g = g, f
        key = (code, f, g)
        found = self._apply_cache.get(key)
        if found is not None:
            return found
        rf, rg = self.rank_of(f), self.rank_of(g)
        if rf <= rg:
            var, f0, f1 = self._var[f], self._lo[f], self._hi[f]
        else:
            var, f0, f1 = self._var[g], f, f
        if rg <= rf:
            g0, g1 = self._lo[g], self._hi[g]
        else:
            g0, g1 = g, g
        res = self.node(var, self._apply(code, f0, g0), self._apply(code, f1, g1))
        self._apply_cache[key] = res
        return res

    def _unary(self, pair: tuple[int, int], g: int) -> int:
        # pair = (result when g=0, result when g=1)
        if pair == (0, 0):
            return self.ZERO
        if pair == (1, 1):
            return self.ONE
        if pair == (0, 1):
            return g
        return self.negate(g)

    def negate(self, f: int) -> int:
        """Complement by sink swap; size-preserving and involutive."""
        self._check_ref(f)
        if f <= 1:
            return 1 - f
        found = self._neg_cache.get(f)
        if found is not None:
            return found
        res = self.node(self._var[f], self.negate(self._lo[f]), self.negate(self._hi[f]))
        self._neg_cache[f] = res
        self._neg_cache[res] = f
        return res

    def restrict(self, f: int, var: int, bit: int) -> int:
        """Fix ``var`` to ``bit``; the variable is absent from the result."""
        self._check_ref(f)
        rank = self.order.rank(var)
        return self._restrict(f, var, rank, 1 if bit else 0)

    def _restrict(self, f: int, var: int, rank: int, bit: int) -> int:
        rf = self.rank_of(f)
        if rf > rank:
            return f
        if rf == rank:
            return self._hi[f] if bit else self._lo[f]
        key = (f, var, bit)
        found = self._restrict_cache.get(key)
        if found is not None:
            return found
        res = self.node(
            self._var[f],
            self._restrict(self._lo[f], var, rank, bit),
            self._restrict(self._hi[f], var, rank, bit),
        )
        self._restrict_cache[key] = res
        return res

    def exists(self, f: int, var: int) -> int:
        return self.apply(self.restrict(f, var, 0), self.restrict(f, var, 1), "or")

    def forall(self, f: int, var: int) -> int:
        return self.apply(self.restrict(f, var, 0), self.restrict(f, var, 1), "and")

    def exists_many(self, f: int, variables: Iterable[int]) -> int:
        """Quantify a set one variable at a time, deepest rank first."""
        for var in sorted(variables, key=self.order.rank, reverse=True):
            f = self.exists(f, var)
        return f

    def forall_many(self, f: int, variables: Iterable[int]) -> int:
        for var in sorted(variables, key=self.order.rank, reverse=True):
            f = self.forall(f, var)
        return f

    def clear_cache(self) -> None:
        self._apply_cache.clear()
        self._neg_cache.clear()
        self._restrict_cache.clear()

    # -- inspection ----------------------------------------------------------

    def support(self, f: int) -> set[int]:
        self._check_ref(f)
        seen: set[int] = set()
        out: set[int] = set()
        stack = [f]
        while stack:
            r = stack.pop()
            if r <= 1 or r in seen:
                continue
            seen.add(r)
            out.add(self._var[r])
            stack.append(self._lo[r])
            stack.append(self._hi[r])
        return out

    def size(self, f: int) -> int:
        """Number of reachable nodes, sinks included."""
        self._check_ref(f)
        seen = {f}
        stack = [f]
        while stack:
            r = stack.pop()
            if r <= 1:
                continue
            for c in (self._lo[r], self._hi[r]):
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return len(seen)

    def evaluate(self, f: int, assignment: Mapping[int, int]) -> int:
        self._check_ref(f)
        r = f
        while r > 1:
            r = self._hi[r] if assignment[self._var[r]] else self._lo[r]
        return r

    def audit(self) -> None:
        """Structural self-check: reduced, deduplicated, order-respecting."""
        if len(self._unique) != len(self._var) - 2:
            raise ObddError("unique table out of sync with node store")
        for ref in range(2, len(self._var)):
            var, lo, hi = self._var[ref], self._lo[ref], self._hi[ref]
            if lo == hi:
                raise ObddError(f"node {ref} has equal children")
            if self._unique.get((var, lo, hi)) != ref:
                raise ObddError(f"node {ref} missing from unique table")
            rank = self.order.rank(var)
            if self.rank_of(lo) <= rank or self.rank_of(hi) <= rank:
                raise ObddError(f"node {ref} violates the variable order")

    # -- completion ----------------------------------------------------------

    def complete(self, f: int) -> "CompleteObdd":
        """Equivalent complete OBDD over the manager's full variable set.

        States at each layer are the distinct subfunctions on the remaining
        variables; since diagrams are canonical, distinctness is reference
        inequality.  The result has at most (|X|+1) * size(f) nodes.
        """
        self._check_ref(f)
        layers: list[list[int]] = []
        transitions: list[dict[int, tuple[int, int]]] = []
        states = [f]
        for rank, var in enumerate(self.order.vars):
            trans: dict[int, tuple[int, int]] = {}
            nxt: list[int] = []
            seen: set[int] = set()
            for s in states:
                if s > 1 and self._var[s] == var:
                    edge = (self._lo[s], self._hi[s])
                else:
                    if self.rank_of(s) < rank:
                        raise ObddError("state below its layer; store corrupt")
                    edge = (s, s)
                trans[s] = edge
                for c in edge:
                    if c not in seen:
                        seen.add(c)
                        nxt.append(c)
            layers.append(states)
            transitions.append(trans)
            states = nxt
        if any(s > 1 for s in states):
            raise ObddError("non-terminal state past the last layer")
        return CompleteObdd(self, layers, transitions, states)


class CompleteObdd:
    """Layered view of a function testing every variable on every path.

    ``layers[i]`` holds the distinct subfunctions entering the test of the
    i-th order variable; ``width`` is the largest layer.
    """

    def __init__(self, manager: Manager, layers, transitions, sinks):
        self.manager = manager
        self.vars = manager.order.vars
        self.layers = layers
        self.transitions = transitions
        self.sinks = sinks

    @property
    def width(self) -> int:
        if not self.layers:
            return 0
        return max(len(layer) for layer in self.layers)

    @property
    def layer_sizes(self) -> list[int]:
        return [len(layer) for layer in self.layers]

    @property
    def size(self) -> int:
        return sum(len(layer) for layer in self.layers) + len(self.sinks)

    @property
    def root(self) -> int:
        return self.layers[0][0] if self.layers else self.sinks[0]

    def states_at(self, cut: int) -> list[int]:
        """Distinct subfunctions after the first ``cut`` variables."""
        if not 0 <= cut <= len(self.vars):
            raise ValueError(f"cut {cut} out of range")
        if cut < len(self.vars):
            return list(self.layers[cut])
        return list(self.sinks)

    def evaluate(self, assignment: Mapping[int, int]) -> int:
        state = self.root
        for var, trans in zip(self.vars, self.transitions):
            state = trans[state][1 if assignment[var] else 0]
        return state


# -- serialization -----------------------------------------------------------
#
# Text block format, also embedded in trace and strategy files:
#
#   obdd <k>
#   <idx> <var|T0|T1> <lo-idx> <hi-idx>
#
# Sinks use T0/T1 with `-` children.  Indices are local to the block and
# topologically ordered (children before parents); the root is the last
# index.  Variables are the 1-based ids used in the QDIMACS input.


def serialize(manager: Manager, f: int) -> str:
    manager._check_ref(f)
    index: dict[int, int] = {}
    lines: list[str] = []

    order: list[int] = []
    seen: set[int] = set()
    stack: list[tuple[int, bool]] = [(f, False)]
    while stack:
        ref, expanded = stack.pop()
        if ref in seen and not expanded:
            continue
        if expanded:
            order.append(ref)
            continue
        seen.add(ref)
        stack.append((ref, True))
        if ref > 1:
            lo, hi = manager.children(ref)
            for c in (hi, lo):
                if c not in seen:
                    stack.append((c, False))
    for ref in order:
        idx = len(index)
        index[ref] = idx
        if ref <= 1:
            lines.append(f"{idx} T{ref} - -")
        else:
            lines.append(
                f"{idx} {manager.var_of(ref)} "
                f"{index[manager.children(ref)[0]]} {index[manager.children(ref)[1]]}"
            )
    return "\n".join([f"obdd {len(lines)}"] + lines)


def parse_block_nodes(text: str) -> list[tuple[int | None, int | None, int | None]]:
    """Raw (var, lo, hi) rows of a block; sinks are (None, None, sink-bit)."""
    lines = [ln.strip() for ln in text.strip().splitlines()]
    if not lines:
        raise BlockFormatError("empty block")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "obdd":
        raise BlockFormatError(f"bad block header: {lines[0]!r}")
    try:
        k = int(head[1])
    except ValueError:
        raise BlockFormatError(f"bad block count: {head[1]!r}") from None
    if k < 1 or len(lines) - 1 != k:
        raise BlockFormatError(f"block declares {k} nodes, has {len(lines) - 1}")
    rows: list[tuple[int | None, int | None, int | None]] = []
    for i, ln in enumerate(lines[1:]):
        parts = ln.split()
        if len(parts) != 4:
            raise BlockFormatError(f"bad block line: {ln!r}")
        if parts[0] != str(i):
            raise BlockFormatError(f"block indices must be 0..k-1 in order: {ln!r}")
        if parts[1] in ("T0", "T1"):
            if parts[2] != "-" or parts[3] != "-":
                raise BlockFormatError(f"sink with children: {ln!r}")
            rows.append((None, None, int(parts[1][1])))
        else:
            try:
                var, lo, hi = int(parts[1]), int(parts[2]), int(parts[3])
            except ValueError:
                raise BlockFormatError(f"bad block line: {ln!r}") from None
            if not (0 <= lo < i and 0 <= hi < i):
                raise BlockFormatError(f"children must precede parents: {ln!r}")
            rows.append((var, lo, hi))
    return rows


def deserialize(text: str, manager: Manager) -> int:
    """Rebuild a block in ``manager``; the result is canonical there.

    Raises ``BlockFormatError`` on malformed text and ``OrderError`` when the
    block's edges are inconsistent with the manager's variable order.
    """
    rows = parse_block_nodes(text)
    refs: list[int] = []
    for var, lo, hi in rows:
        if var is None:
            refs.append(manager.const(hi))
        else:
            refs.append(manager.node(var, refs[lo], refs[hi]))
    return refs[-1]


def block_variables(text: str) -> set[int]:
    return {var for var, _, _ in parse_block_nodes(text) if var is not None}


def block_order_constraints(text: str) -> set[tuple[int, int]]:
    """Pairs (earlier, later) that any compatible variable order must respect."""
    rows = parse_block_nodes(text)
    out: set[tuple[int, int]] = set()
    for var, lo, hi in rows:
        if var is None:
            continue
        for child in (lo, hi):
            cvar = rows[child][0]
            if cvar is not None:
                out.add((var, cvar))
    return out
