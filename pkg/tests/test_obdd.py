import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qobdd import obdd
from qobdd.obdd import (
    OPS,
    BlockFormatError,
    BudgetExceededError,
    Manager,
    ObddError,
    OrderError,
    VarOrder,
)

from .helpers import assignments, obdd_from_table, random_table, truth_table_of, cofactor_counts


def mgr(n=4):
    return Manager(VarOrder(range(1, n + 1)))


def test_sinks():
    m = mgr()
    assert m.const(0) == Manager.ZERO
    assert m.const(1) == Manager.ONE
    assert m.const(0) != m.const(1)
    for a in assignments([1, 2]):
        assert m.evaluate(m.const(0), a) == 0
        assert m.evaluate(m.const(1), a) == 1


def test_node_basics():
    m = mgr()
    lit = m.node(1, m.ZERO, m.ONE)
    assert lit == m.literal(1)
    other = m.literal(2)
    assert m.node(1, other, other) == other  # redundant test collapses
    assert m.node(1, m.ZERO, m.ONE) == lit  # same args, identical reference


def test_node_order_violation():
    m = mgr()
    inner = m.literal(1)
    with pytest.raises(OrderError):
        m.node(2, inner, m.ZERO)
    with pytest.raises(OrderError):
        m.node(1, m.literal(1), m.ZERO)


def test_apply_and_identity():
    m = mgr()
    x, y = m.literal(1), m.literal(2)
    f = m.apply(x, y, "and")
    assert truth_table_of(m, f, [1, 2]) == (0, 0, 0, 1)
    assert m.apply(f, m.ONE, "and") == f
    assert m.apply(f, m.ZERO, "or") == f


OP_FUNCS = {name: code for name, code in OPS.items()}


@pytest.mark.parametrize("op", sorted(OPS))
def test_apply_all_ops_against_tables(op):
    rng = random.Random(hash(op) & 0xFFFF)
    m = Manager(VarOrder(range(1, 7)))
    for _ in range(12):
        tf, tg = random_table(rng, 6), random_table(rng, 6)
        f = obdd_from_table(m, range(1, 7), tf)
        g = obdd_from_table(m, range(1, 7), tg)
        res = m.apply(f, g, op)
        code = OPS[op]
        want = tuple((code >> ((a << 1) | b)) & 1 for a, b in zip(tf, tg))
        assert truth_table_of(m, res, range(1, 7)) == want


def test_negate_basics():
    m = mgr()
    assert m.negate(m.ZERO) == m.ONE
    f = m.apply(m.literal(1), m.literal(3), "xor")
    assert m.negate(m.negate(f)) == f  # involution, same reference


def test_negate_preserves_size():
    rng = random.Random(5)
    m = Manager(VarOrder(range(1, 9)))
    for _ in range(25):
        f = obdd_from_table(m, range(1, 9), random_table(rng, 8))
        g = m.negate(f)
        assert m.size(g) == m.size(f)
        assert truth_table_of(m, g, range(1, 9)) == tuple(
            1 - b for b in truth_table_of(m, f, range(1, 9))
        )


def test_restrict_trivial():
    m = mgr()
    x = m.literal(1)
    assert m.restrict(x, 1, 1) == m.ONE
    f = m.apply(m.literal(1), m.literal(2), "and")
    assert m.restrict(f, 1, 0) == m.ZERO
    assert m.restrict(f, 3, 1) == f  # absent variable


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_restrict_support_and_semantics(data):
    m = Manager(VarOrder(range(1, 7)))
    table = tuple(data.draw(st.integers(0, 1)) for _ in range(64))
    f = obdd_from_table(m, range(1, 7), table)
    var = data.draw(st.integers(1, 6))
    bit = data.draw(st.integers(0, 1))
    g = m.restrict(f, var, bit)
    assert var not in m.support(g)
    assert m.support(g) <= m.support(f) - {var}
    for a in assignments(range(1, 7)):
        assert m.evaluate(g, a) == m.evaluate(f, {**a, var: bit})


def test_quantification_trivial():
    m = mgr()
    f = m.apply(m.literal(1), m.literal(2), "and")
    assert m.exists(f, 1) == m.literal(2)
    g = m.apply(m.literal(1), m.literal(2), "or")
    assert m.forall(g, 1) == m.literal(2)


def test_quantification_against_projection_oracle():
    rng = random.Random(77)
    m = Manager(VarOrder(range(1, 7)))
    for _ in range(40):
        table = random_table(rng, 6)
        f = obdd_from_table(m, range(1, 7), table)
        var = rng.randint(1, 6)
        ex = m.exists(f, var)
        fa = m.forall(f, var)
        for a in assignments(range(1, 7)):
            v0 = m.evaluate(f, {**a, var: 0})
            v1 = m.evaluate(f, {**a, var: 1})
            assert m.evaluate(ex, a) == (v0 | v1)
            assert m.evaluate(fa, a) == (v0 & v1)


def test_quantify_many_matches_iterated_single():
    rng = random.Random(55)
    m = Manager(VarOrder(range(1, 7)))
    for _ in range(20):
        f = obdd_from_table(m, range(1, 7), random_table(rng, 6))
        vs = rng.sample(range(1, 7), rng.randint(1, 3))
        ex = m.exists_many(f, vs)
        fa = m.forall_many(f, vs)
        for a in assignments(range(1, 7)):
            sub = [
                m.evaluate(f, {**a, **dict(zip(vs, bits))})
                for bits in product((0, 1), repeat=len(vs))
            ]
            assert m.evaluate(ex, a) == max(sub)
            assert m.evaluate(fa, a) == min(sub)


def test_canonicity_of_construction_paths():
    # same function via Shannon expansion and via minterm disjunction
    rng = random.Random(9)
    m = Manager(VarOrder(range(1, 6)))
    for _ in range(30):
        table = random_table(rng, 5)
        f = obdd_from_table(m, range(1, 6), table)
        g = m.ZERO
        for a, bit in zip(assignments(range(1, 6)), table):
            if bit:
                g = m.apply(g, m.cube(a), "or")
        assert f == g


def test_complete_of_sink():
    m = Manager(VarOrder([1, 2]))
    co = m.complete(m.ONE)
    assert co.width == 1
    assert co.layer_sizes == [1, 1]
    assert co.size == 3  # two chain nodes plus the sink


def test_complete_size_bound_and_semantics():
    rng = random.Random(3)
    for nv in (4, 6, 8, 10):
        m = Manager(VarOrder(range(1, nv + 1)))
        for _ in range(8):
            f = obdd_from_table(m, range(1, nv + 1), random_table(rng, nv))
            co = m.complete(f)
            assert co.size <= (nv + 1) * m.size(f)
            for a in assignments(range(1, nv + 1)):
                assert co.evaluate(a) == m.evaluate(f, a)


def test_width_of_literal():
    m = Manager(VarOrder([1]))
    assert m.complete(m.literal(1)).width == 1


def test_width_matches_cofactor_oracle():
    # graph inner product on two pairs, pair-interleaved order
    m = Manager(VarOrder([1, 2, 3, 4]))
    p1 = m.apply(m.literal(1), m.literal(2), "and")
    p2 = m.apply(m.literal(3), m.literal(4), "and")
    ip = m.apply(p1, p2, "xor")
    co = m.complete(ip)
    assert co.layer_sizes == cofactor_counts(m, ip)


def test_width_matches_cofactor_oracle_random():
    rng = random.Random(21)
    m = Manager(VarOrder(range(1, 7)))
    for _ in range(10):
        f = obdd_from_table(m, range(1, 7), random_table(rng, 6))
        assert m.complete(f).layer_sizes == cofactor_counts(m, f)


def test_serialize_roundtrip_trivial():
    m = mgr()
    for f in (m.ZERO, m.ONE, m.literal(2), m.literal(3, positive=False)):
        blk = obdd.serialize(m, f)
        m2 = Manager(VarOrder(range(1, 5)))
        g = obdd.deserialize(blk, m2)
        assert truth_table_of(m, f, range(1, 5)) == truth_table_of(m2, g, range(1, 5))


def test_serialize_roundtrip_random():
    rng = random.Random(11)
    for _ in range(200):
        m = Manager(VarOrder(range(1, 11)))
        f = obdd_from_table(m, range(1, 11), random_table(rng, 10))
        blk = obdd.serialize(m, f)
        m2 = Manager(VarOrder(range(1, 11)))
        g = obdd.deserialize(blk, m2)
        assert truth_table_of(m, f, range(1, 11)) == truth_table_of(m2, g, range(1, 11))
        assert obdd.deserialize(blk, m) == f


def test_deserialize_rejects_malformed():
    m = mgr()
    with pytest.raises(BlockFormatError):
        obdd.deserialize("obdd 2\n0 T0 - -", m)  # truncated
    with pytest.raises(BlockFormatError):
        obdd.deserialize("obdd 1\n0 T0 0 1", m)  # sink with children
    with pytest.raises(BlockFormatError):
        obdd.deserialize("nonsense", m)
    with pytest.raises(BlockFormatError):
        obdd.deserialize("obdd 3\n0 T0 - -\n1 T1 - -\n2 1 2 0", m)  # forward ref


def test_deserialize_rejects_order_mismatch():
    m1 = Manager(VarOrder([1, 2]))
    f = m1.apply(m1.literal(1), m1.literal(2), "or")
    blk = obdd.serialize(m1, f)
    m2 = Manager(VarOrder([2, 1]))
    with pytest.raises(OrderError):
        obdd.deserialize(blk, m2)


def test_audit_and_store_invariants():
    rng = random.Random(2)
    m = Manager(VarOrder(range(1, 9)))
    refs = [obdd_from_table(m, range(1, 9), random_table(rng, 8)) for _ in range(20)]
    for i in range(0, len(refs) - 1, 2):
        m.apply(refs[i], refs[i + 1], rng.choice(sorted(OPS)))
        m.exists(refs[i], rng.randint(1, 8))
        m.negate(refs[i + 1])
    m.audit()


def test_foreign_reference_rejected():
    big = Manager(VarOrder(range(1, 9)))
    f = obdd_from_table(big, range(1, 9), random_table(random.Random(0), 8))
    small = Manager(VarOrder(range(1, 9)))
    with pytest.raises(ObddError):
        small.apply(f, small.ONE, "and")


def test_node_budget():
    m = Manager(VarOrder(range(1, 9)), node_budget=4)
    with pytest.raises(BudgetExceededError):
        obdd_from_table(m, range(1, 9), random_table(random.Random(1), 8))


def test_clear_cache_keeps_results_canonical():
    m = mgr()
    f = m.apply(m.literal(1), m.literal(2), "xor")
    m.clear_cache()
    assert m.apply(m.literal(1), m.literal(2), "xor") == f
