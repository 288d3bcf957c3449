import pytest
from hypothesis import given, settings, strategies as st

from odyn import (
    BinaryMultipleRelation,
    MultipleRelation,
    PartialFamily,
    connective_structure,
    constant_relation,
    is_compatible,
    is_splittable,
    join,
    rb_image,
    rb_preimage,
    rd,
    restrict,
    rm,
    tensor,
)
from odyn.multirel import RelationError, make_tuple

import oracles
from gen import AB, AC, XY, XZ, fixture1, fixture2


@pytest.fixture(scope="module")
def R1():
    return fixture1().interaction


@pytest.fixture(scope="module")
def R2():
    return fixture2().interaction


def test_unit_relation_on_empty_index():
    one = constant_relation(set(), {}, "one")
    assert one.graph == {frozenset()}
    assert constant_relation(set(), {}, "zero").graph == frozenset()


def test_constant_one_on_a_slot():
    one = constant_relation({"i"}, {"i": {"p", "q"}}, "one")
    assert one.graph == {make_tuple({"i": "p"}), make_tuple({"i": "q"})}


def test_empty_context_rejected():
    with pytest.raises(RelationError):
        constant_relation({"i"}, {"i": set()}, "one")


def test_restrict(R1):
    M = rm(R1)
    assert restrict(M, M.index) == M
    assert restrict(M, {"0"}).graph == {make_tuple({"0": (AB, "u")}), make_tuple({"0": (AC, "v")})}
    assert restrict(M, set()).graph == {frozenset()}
    with pytest.raises(RelationError):
        restrict(M, {"9"})


def test_tensor(R1):
    one = constant_relation(set(), {}, "one")
    M = rm(R1)
    assert tensor(M, one) == M
    p = MultipleRelation({"i": {"p"}}, [{"i": "p"}])
    q = MultipleRelation({"j": {"q"}}, [{"j": "q"}])
    assert tensor(p, q).graph == {make_tuple({"i": "p", "j": "q"})}
    split = tensor(restrict(M, {"0"}), restrict(M, {"1"}))
    assert len(split) == 4 and len(M) == 2
    with pytest.raises(RelationError):
        tensor(M, M)


def test_rd_rm(R1):
    D = rd(R1)
    assert D.index == {("0", 0), ("0", 1), ("1", 0), ("1", 1)}
    assert len(D) == 2 == len(rm(R1))
    C = BinaryMultipleRelation({"i": {"a"}}, {"i": {"b"}}, [{"i": ("a", "b")}])
    assert rd(C).graph == {make_tuple({("i", 0): "a", ("i", 1): "b"})}
    E = BinaryMultipleRelation({"i": {"a"}}, {"i": {"b"}})
    assert len(rd(E)) == 0 and len(rm(E)) == 0


def test_rb_image_and_preimage(R1):
    assert rb_image(R1) == {make_tuple({"0": "u", "1": "w"}), make_tuple({"0": "v", "1": "w"})}
    assert rb_preimage(R1, {"0": "u", "1": "w"}) == {make_tuple({"0": AB, "1": XY})}
    with pytest.raises(RelationError):
        rb_preimage(R1, {"0": "u", "1": "u"})
    C = BinaryMultipleRelation({"i": {"a"}}, {"i": {"b", "c"}}, [{"i": ("a", "b")}])
    assert rb_preimage(C, {"i": "c"}) == frozenset()
    assert rb_image(BinaryMultipleRelation({"i": {"a"}}, {"i": {"b"}})) == frozenset()


def test_rb_image_of_full_relation():
    ins, outs = {"i": {"a"}, "j": {"c"}}, {"i": {"b", "b'"}, "j": {"d", "d'"}}
    full = [{"i": ("a", x), "j": ("c", y)} for x in outs["i"] for y in outs["j"]]
    C = BinaryMultipleRelation(ins, outs, full)
    assert len(rb_image(C)) == 4


def test_join():
    q = PartialFamily.of(exits={"0": "u"})
    r = PartialFamily.of(entries={"1": XY})
    assert join(q, PartialFamily()) == q
    assert join(q, r).slots == {("0", 1), ("1", 0)}
    with pytest.raises(RelationError):
        join(q, PartialFamily.of(exits={"0": "v"}))


def test_compatibility(R1):
    assert is_compatible(R1, PartialFamily())
    assert is_compatible(R1, PartialFamily.of(entries={"1": XY}, exits={"0": "u"}))
    assert not is_compatible(R1, PartialFamily.of(entries={"1": XZ}, exits={"0": "u"}))
    with pytest.raises(RelationError):
        is_compatible(R1, PartialFamily({("7", 0): "a"}))


def test_splittable(R1, R2):
    assert not is_splittable(rm(R1), {"0", "1"}, {"0"}, {"1"})
    assert is_splittable(rm(R2), {"0", "1"}, {"0"}, {"1"})
    with pytest.raises(RelationError):
        is_splittable(rm(R1), {"0"}, {"0"}, set())


def test_connective_structure(R1, R2):
    assert connective_structure(R1) == [frozenset({"0"}), frozenset({"1"}), frozenset({"0", "1"})]
    assert connective_structure(R2) == [frozenset({"0"}), frozenset({"1"})]
    assert connective_structure(R1, include_empty=True)[0] == frozenset()
    single = BinaryMultipleRelation({"0": {"a"}}, {"0": {"b"}}, [{"0": ("a", "b")}])
    assert connective_structure(single) == [frozenset({"0"})]


# -- random binary relations with up to five slots --------------------------

@st.composite
def binary_relations(draw, max_index=5):
    n = draw(st.integers(1, max_index))
    index = [str(k) for k in range(n)]
    ins = {i: [f"a{i}{k}" for k in range(draw(st.integers(1, 2)))] for i in index}
    outs = {i: [f"b{i}{k}" for k in range(draw(st.integers(1, 2)))] for i in index}
    row = st.fixed_dictionaries({i: st.tuples(st.sampled_from(ins[i]), st.sampled_from(outs[i])) for i in index})
    rows = draw(st.lists(row, min_size=0, max_size=6))
    return BinaryMultipleRelation(ins, outs, rows)


@settings(max_examples=150, deadline=None)
@given(binary_relations())
def test_connective_structure_matches_exhaustive_search(C):
    rows = oracles.raw_rm_tuples(C)
    assert set(connective_structure(C)) == oracles.brute_connective(rows, C.index)
    assert set(connective_structure(C, True)) == oracles.brute_connective(rows, C.index, True)


@settings(max_examples=100, deadline=None)
@given(binary_relations())
def test_singletons_are_always_connective(C):
    cs = connective_structure(C)
    assert all(frozenset({i}) in cs for i in C.index)


@settings(max_examples=100, deadline=None)
@given(binary_relations(), st.data())
def test_compatibility_is_closed_under_restriction(C, data):
    rows = oracles.rd_rows(C)
    if not rows:
        return
    row = data.draw(st.sampled_from(rows))
    keys = data.draw(st.sets(st.sampled_from(sorted(row, key=repr))))
    p = PartialFamily({k: row[k] for k in keys})
    assert is_compatible(C, p)
    smaller = PartialFamily({k: row[k] for k in list(keys)[:1]})
    assert is_compatible(C, smaller)


@settings(max_examples=100, deadline=None)
@given(binary_relations())
def test_rd_and_rm_are_injective_encodings(C):
    assert len(rd(C)) == len(rm(C)) == len(C.graph)
