import pytest
from hypothesis import given, strategies as st

from odyn import Transition, TransitionFamily, classify, compose, compose_family, image, pointwise_subset
from odyn.transitions import ContextMismatch, Determinism

from gen import fixture1_parts


def T(src, tgt, m=None):
    return Transition(src, tgt, m)


def test_compose_unions_images():
    f = T({"a"}, {"b1", "b2"}, {"a": {"b1", "b2"}})
    g = T({"b1", "b2"}, {"c"}, {"b1": {"c"}})
    assert compose(f, g)("a") == {"c"}


def test_compose_with_empty_image():
    f = T({"a"}, {"b"})
    g = T({"b"}, {"c"}, {"b": {"c"}})
    assert compose(f, g)("a") == frozenset()


def test_identity_either_side():
    f = T({"a", "a'"}, {"b", "c"}, {"a": {"b"}, "a'": {"b", "c"}})
    assert compose(Transition.identity(f.source), f) == f
    assert compose(f, Transition.identity(f.target)) == f


def test_mismatched_middle_set():
    with pytest.raises(ContextMismatch):
        compose(T({"a"}, {"b"}), T({"c"}, {"d"}))


def test_image():
    assert image(T({"a", "a'"}, {"b", "c"}, {"a": {"b"}, "a'": {"b", "c"}})) == {"b", "c"}
    assert image(T({"a"}, {"b"})) == frozenset()
    _, _, A0, _ = fixture1_parts()
    assert image(A0.trans("e", "u")) == {"b"}


def test_classify():
    assert classify(T({"a", "a'"}, {"b"}, {"a": {"b"}, "a'": {"b"}})) is Determinism.DETERMINISTIC
    assert classify(T({"a", "a'"}, {"b"}, {"a'": {"b"}})) is Determinism.QUASI_DETERMINISTIC
    assert classify(T({"a"}, {"b", "c"}, {"a": {"b", "c"}})) == "general"


def test_pointwise_subset():
    f = T({"a"}, {"b", "c"}, {"a": {"b", "c"}})
    g = T({"a"}, {"b", "c"}, {"a": {"b"}})
    assert pointwise_subset(f, f)
    assert pointwise_subset(T({"a"}, {"b", "c"}), g)
    assert not pointwise_subset(f, g)
    with pytest.raises(ContextMismatch):
        pointwise_subset(f, T({"z"}, {"b"}))


def test_image_outside_target_rejected():
    with pytest.raises(ContextMismatch):
        T({"a"}, {"b"}, {"a": {"q"}})


def test_compose_family_direct():
    f = TransitionFamily({"u": T({"a"}, {"b", "c"}, {"a": {"b"}}), "v": T({"a"}, {"b", "c"}, {"a": {"c"}})})
    g = TransitionFamily({"u": T({"b", "c"}, {"d"}, {"b": {"d"}}), "v": T({"b", "c"}, {"d"})})
    h = compose_family(f, g)
    assert h["u"]("a") == {"d"} and h["v"]("a") == frozenset()


def test_compose_family_singleton_matches_compose():
    f = T({"a"}, {"b"}, {"a": {"b"}})
    g = T({"b"}, {"c"}, {"b": {"c"}})
    assert compose_family(TransitionFamily({"p": f}), TransitionFamily({"p": g}))["p"] == compose(f, g)


def test_compose_family_with_identity_fixture():
    _, _, A0, _ = fixture1_parts()
    fam = TransitionFamily({mu: A0.trans("e", mu) for mu in ("u", "v")})
    ident = TransitionFamily.identity({"u", "v"}, A0.multi.state_sets["T"])
    assert compose_family(fam, ident) == fam


def test_compose_family_param_mismatch():
    f = TransitionFamily({"u": T({"a"}, {"b"})})
    g = TransitionFamily({"v": T({"b"}, {"c"})})
    with pytest.raises(ContextMismatch):
        compose_family(f, g)


SETS = ["p", "q", "r", "s"]


@st.composite
def transitions(draw, src, tgt):
    return Transition(src, tgt, {a: draw(st.sets(st.sampled_from(sorted(tgt)) if tgt else st.nothing()))
                                 for a in sorted(src)})


@st.composite
def triples(draw):
    sizes = [draw(st.integers(0, 4)) for _ in range(4)]
    sets = [frozenset(f"{n}{k}" for k in range(m)) for n, m in zip("ABCD", sizes)]
    return tuple(draw(transitions(sets[k], sets[k + 1])) for k in range(3))


@given(triples())
def test_composition_is_associative(fgh):
    f, g, h = fgh
    assert compose(compose(f, g), h) == compose(f, compose(g, h))


@given(triples())
def test_composition_is_monotone(fgh):
    f, g, _ = fgh
    smaller = Transition(f.source, f.target, {a: set(sorted(f(a))[:1]) for a in f.source})
    assert pointwise_subset(compose(smaller, g), compose(f, g))


@given(triples())
def test_quasi_deterministic_closed_under_composition(fgh):
    f, g, _ = fgh
    qd = lambda t: Transition(t.source, t.target, {a: set(sorted(t(a))[:1]) for a in t.source})
    assert classify(compose(qd(f), qd(g))) is not Determinism.GENERAL
