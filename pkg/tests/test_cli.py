import io
from pathlib import Path

import pytest

from odyn import (
    Clock,
    Graph,
    OpenDynamics,
    generate,
    parse_family,
    parse_open_dynamics,
    render,
    serialize_open_dynamics,
)
from odyn.cli import run
from odyn.odf import ParseError

from gen import corpus, fixture1

DATA = Path(__file__).parent / "data"
FIX1 = DATA / "fixture1.odf"
FIX2 = DATA / "fixture2.odf"


def odyn(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def _rendered(d):
    """Semantic content of an open dynamics with every id rendered to text."""
    m = d.multi
    return (
        {render(v): {render(s) for s in ss} for v, ss in m.state_sets.items()},
        {(e, render(mu)): {render(a): {render(b) for b in img} for a, img in t.map.items()}
         for (e, mu), t in m.edge_trans.items()},
        {render(s): render(t) for s, t in d.datation.items()},
        {render(mu) for mu in m.params},
    )


# -- parsing -----------------------------------------------------------------

def test_fixture_file_parses():
    doc = parse_family(FIX1.read_text())
    assert doc.name == "fixture1"
    assert len(doc.components) == 2
    assert len(doc.family.interaction.graph) == 2
    assert doc.family.interaction == fixture1().interaction


def test_fixture2_file_has_the_full_product():
    doc = parse_family(FIX2.read_text())
    assert len(doc.family.interaction.graph) == 24


def test_empty_file():
    with pytest.raises(ParseError, match="missing FAMILY header"):
        parse_family("")


def test_unknown_state_reports_its_line():
    text = FIX1.read_text().replace("TRANS e u a -> b", "TRANS e u a -> q")
    line = FIX1.read_text().splitlines().index("TRANS e u a -> b") + 1
    with pytest.raises(ParseError) as exc:
        parse_family(text)
    assert exc.value.line == line


def test_duplicate_component():
    text = FIX1.read_text().replace("COMPONENT 1 USES A1", "COMPONENT 0 USES A1")
    with pytest.raises(ParseError, match="duplicate component"):
        parse_family(text)


def test_reference_to_a_non_realization_is_rejected():
    text = FIX1.read_text().replace("REAL ab OF 0 PARAM u", "REAL ab OF 0 PARAM v")
    with pytest.raises(ParseError):
        parse_family(text)


def test_inline_literals_match_named_realizations():
    text = FIX1.read_text()
    head, _, _ = text.partition("INTERACT")
    literal = head + "INTERACT\n(0:[t0=a,t1=b],u) (1:[t0=x,t1=y],w)\n(0:[t0=a,t1=c],v) (1:[t0=x,t1=z],w)\n"
    assert parse_family(literal).family.interaction == parse_family(text).family.interaction


# -- serialization -------------------------------------------------------------

def test_serialized_primo_lists_states_and_steps():
    text = serialize_open_dynamics(generate(fixture1(), "p"))
    body = text.split("\nODYN ", 1)[1].splitlines()
    states = [ln for ln in body if ln.startswith("STATE ")]
    steps = [ln for ln in text.splitlines() if ln.startswith("TRANS e (")]
    assert sum(len(ln.split()) - 2 for ln in states) == 5
    assert steps == ["TRANS e (u,w) (a,x) -> (b,y)", "TRANS e (v,w) (a,x) -> (c,z)"]


def test_empty_dynamics_is_header_only():
    g = Graph()
    d = OpenDynamics.build(g, Clock(g, {}), {"p"}, {}, {}, {})
    assert serialize_open_dynamics(d) == "GRAPH motor\nCLOCK clock ON motor\nODYN dyn ON motor CLOCK clock PARAMS p\n"
    assert serialize_open_dynamics(parse_open_dynamics(serialize_open_dynamics(d))) == serialize_open_dynamics(d)


def test_whitespace_ids_are_refused():
    g = Graph.build({"S"})
    d = OpenDynamics.build(g, Clock(g, {"S": {"t"}}), {"p"}, {"S": {"a b"}}, {}, {"a b": "t"})
    with pytest.raises(ValueError):
        serialize_open_dynamics(d)


@pytest.mark.parametrize("mode", "pfsm")
def test_round_trip_over_corpus(mode):
    for F in corpus(40, seed=11):
        d = generate(F, mode)
        text = serialize_open_dynamics(d)
        back = parse_open_dynamics(text)
        assert _rendered(back) == _rendered(d)
        assert serialize_open_dynamics(back) == text


# -- command line --------------------------------------------------------------

def test_validate():
    assert odyn("validate", FIX1) == (0, "OK\n", "")


def test_connective():
    assert odyn("connective", FIX1)[1] == "{0} {1} {0,1}\n"
    assert odyn("connective", FIX2)[1] == "{0} {1}\n"
    assert odyn("connective", FIX1, "--include-empty")[1] == "{} {0} {1} {0,1}\n"


def test_heaps():
    assert odyn("heaps", FIX1, "--mode", "f")[1] == "0: {u,v}\n1: {w}\n"
    assert odyn("heaps", FIX1, "--mode", "s")[1] == "0: {u,v}\n1: {}\n"
    assert odyn("heaps", FIX2, "--mode", "s")[1] == "0: {}\n1: {}\n"


def test_realizations():
    code, out, _ = odyn("realizations", FIX1, "--component", "1")
    assert code == 0
    assert out == "w []\nw [t0=x]\nw [t0=x,t1=y]\nw [t0=x,t1=z]\n"
    assert odyn("realizations", FIX1, "--component", "9")[0] == 2


def test_generate_mono():
    code, out, _ = odyn("generate", FIX1, "--mode", "m")
    assert code == 0
    assert "ODYN fixture1_m ON g CLOCK h0 PARAMS ~(u,w)\n" in out
    assert "TRANS e ~(u,w) (a,x) -> (b,y) (c,z)\n" in out
    d = parse_open_dynamics(out)
    assert _rendered(d) == _rendered(generate(fixture1(), "m"))


def test_out_flag_and_determinism(tmp_path):
    for mode in "pfsm":
        a, b = tmp_path / f"{mode}1.odf", tmp_path / f"{mode}2.odf"
        assert odyn("generate", FIX1, "--mode", mode, "--out", a) == (0, "", "")
        assert odyn("generate", FIX1, "--mode", mode, "--out", b)[0] == 0
        assert a.read_bytes() == b.read_bytes()
        assert b"\r" not in a.read_bytes()


def test_budget_failure():
    code, _, err = odyn("generate", FIX1, "--mode", "s", "--budget", "1")
    assert code == 1 and "budget" in err


def test_exit_codes(tmp_path):
    assert odyn("validate", tmp_path / "missing.odf")[0] == 2
    assert odyn("frobnicate", FIX1)[0] == 2
    assert odyn("generate", FIX1, "--mode", "z")[0] == 2
    empty = tmp_path / "empty.odf"
    empty.write_text("")
    code, _, err = odyn("validate", empty)
    assert code == 1 and "missing FAMILY header" in err


def test_parse_error_names_the_line(tmp_path):
    bad = tmp_path / "bad.odf"
    bad.write_text(FIX1.read_text().replace("DATE c t1", "DATE c"))
    code, _, err = odyn("validate", bad)
    line = FIX1.read_text().splitlines().index("DATE c t1") + 1
    assert code == 1 and err.startswith(f"{bad}:{line}:")


def test_invalid_family_fails_validation(tmp_path):
    bad = tmp_path / "bad.odf"
    bad.write_text(FIX1.read_text().replace("SYNC 1 VMAP S=S T=T EMAP e=e CMAP t0=t0 t1=t1", ""))
    code, out, _ = odyn("validate", bad)
    assert code == 1 and "missing-synchronization 1" in out
