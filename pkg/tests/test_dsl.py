import pytest
from hypothesis import given, strategies as st

from oracles import polys
from vbkit.actions import ChartedAction
from vbkit.algebroid import AlgebroidData
from vbkit.corpus import files, text
from vbkit.dsl import DSLError, evaluate, parse, parse_expression, parse_syntax, print_document
from vbkit.dsl.ast import Document
from vbkit.dsl.emit import declare
from vbkit.geometry import Chart
from vbkit.poisson import PoissonData
from vbkit.scalar import Scalar

CORPUS = [p.name for p in files()]


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_reprints_to_the_same_document(name):
    doc = parse(text(name))
    again = print_document(doc)
    assert parse_syntax(again) == doc
    # printing is idempotent
    assert print_document(parse_syntax(again)) == again


@pytest.mark.parametrize("name", CORPUS)
def test_every_corpus_value_survives_emit_and_reparse(name):
    env = evaluate(parse(text(name)))
    for key, value in env.values.items():
        try:
            stmts = declare("v", value)
        except TypeError:
            continue
        env2 = evaluate(parse(print_document(Document(tuple(stmts)))))
        assert env2["v"] == value, key


@pytest.mark.parametrize("src, kind, loc", [
    ("chart R { x }\nalgebroid A over R {\n  frame { a }\n  anchor { a: { z: 1 } }\n}\n", "resolution", "4:17"),
    ("chart R { x $ }\n", "lexical", "1:13"),
    ("chart R { x\n", "syntax", "2:1"),
    ("chart R { x }\nchart R { y }\n", "resolution", "2:1"),
    ("chart R { x }\ncheck axioms(Q) expect pass\n", "resolution", "2:14"),
    ("chart R { x }\ncheck nosuch(R) expect pass\n", "resolution", "2:1"),
    ("chart R { x }\ncheck axioms(R) expect maybe\n", "syntax", "2:24"),
    ("chart R { x }\naction h on R map { x: x/0 }\n", "value", "2:25"),
])
def test_diagnostics_carry_kind_and_location(src, kind, loc):
    with pytest.raises(DSLError) as info:
        parse(src)
    assert info.value.kind == kind
    assert str(info.value.loc) == loc


def test_undeclared_name_in_anchor_is_resolution_error():
    src = "chart R { x }\nalgebroid A over R {\n  frame { a }\n  anchor { b: { x: 1 } }\n}\n"
    with pytest.raises(DSLError, match="b") as info:
        parse(src)
    assert info.value.kind == "resolution"


def test_expressions():
    assert parse_expression("x^2 - 2*x*y + 1/2") == Scalar.parse("x^2 - 2*x*y + 1/2")
    assert parse_expression("(x + y)^2") == Scalar.parse("x^2 + 2*x*y + y^2")
    assert parse_expression("l^-1*x") == Scalar.var("l", -1) * Scalar.var("x")


def test_mult_binders_are_qualified():
    src = """chart M { x }
chart G { p q }
groupoid pair over M arrows G {
  source { x: q }
  target { x: p }
  unit { p: x, q: x }
  inverse { p: q, q: p }
  mult (g, h) { p: g.p, q: h.q }
}
"""
    env = evaluate(parse(src))
    assert [str(c) for c in env["pair"].mult.components] == ["p", "q__2"]
    printed = print_document(parse(src))
    assert "mult (g, h) {" in printed and "q: h.q" in printed


names = st.lists(st.sampled_from(["x", "y", "z", "u"]), min_size=1, max_size=4, unique=True)


@given(names, st.data())
def test_random_actions_round_trip(coords, data):
    ch = Chart(coords)
    w = {c: data.draw(st.integers(0, 3)) for c in coords}
    h = ChartedAction.diagonal(ch, w)
    doc = Document(tuple(declare("h", h)))
    assert parse_syntax(print_document(doc)) == doc
    assert evaluate(parse(print_document(doc)))["h"] == h


@given(polys(("x", "y"), max_terms=3, max_deg=3))
def test_random_planar_poisson_round_trip(f):
    pi = PoissonData.from_brackets(Chart(["x", "y"]), {("x", "y"): f})
    doc = Document(tuple(declare("pi", pi)))
    assert evaluate(parse(print_document(doc)))["pi"] == pi


@given(polys(("x",), max_terms=3, max_deg=3), polys(("x",), max_terms=3, max_deg=3))
def test_random_algebroid_round_trip(f, g):
    A = AlgebroidData(Chart(["x"]), ["a", "b"], [[f, g]], {(0, 1, 0): f})
    doc = Document(tuple(declare("A", A)))
    assert parse_syntax(print_document(doc)) == doc
    assert evaluate(parse(print_document(doc)))["A"] == A
