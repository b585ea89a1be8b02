import itertools

import pytest
import sympy as sp
from hypothesis import given

from oracles import from_sympy, polys, to_sympy
from vbkit.algebroid import (AlgebroidData, AlgebroidError, action_algebroid, build_nonint_example,
                             check_axioms, check_morphism, cotangent_algebroid, cotangent_of_algebroid,
                             product_algebroid, tangent_algebroid, tangent_bundle_algebroid)
from vbkit.geometry import Chart, PolyMap, VectorField
from vbkit.poisson import PoissonData, check_morphism_via_duality
from vbkit.scalar import Scalar

XYZ = Chart(["x", "y", "z"])
SO3 = AlgebroidData.from_dicts(Chart([]), ["e1", "e2", "e3"], {}, {
    ("e1", "e2"): {"e3": 1}, ("e2", "e3"): {"e1": 1}, ("e3", "e1"): {"e2": 1}})
ROT = {"e1": {"y": "z", "z": "-y"}, "e2": {"x": "-z", "z": "x"}, "e3": {"x": "y", "y": "-x"}}
SHEAR = AlgebroidData.from_dicts(Chart(["x", "y"]), ["s"], {"s": {"y": "x"}})
EX = build_nonint_example({("x", "y"): 1}, ["x", "y"])


def _sympy_commutator(X, Y, coords):
    syms = [sp.Symbol(c) for c in coords]
    return [sp.expand(sum(X[j] * sp.diff(Y[i], syms[j]) - Y[j] * sp.diff(X[i], syms[j])
                          for j in range(len(coords)))) for i in range(len(coords))]


def test_rotation_action_algebroid_brackets_match_commutators():
    fields = {e: VectorField.from_dict(XYZ, c) for e, c in ROT.items()}
    A = action_algebroid(SO3, fields, XYZ)
    assert check_axioms(A).passed
    sym = {e: [sp.sympify(ROT[e].get(c, "0")) for c in XYZ.coords] for e in ROT}
    for a, b in itertools.combinations(A.frame, 2):
        br = A.bracket({a: Scalar.const(1)}, {b: Scalar.const(1)})
        lhs = A.anchor_of(br).components
        want = _sympy_commutator(sym[a], sym[b], XYZ.coords)
        assert list(lhs) == [from_sympy(w) for w in want]


def test_action_algebroid_rejects_non_homomorphism():
    fields = {"e1": VectorField.from_dict(XYZ, {"x": 1}), "e2": VectorField.from_dict(XYZ, {"y": 1})}
    with pytest.raises(AlgebroidError, match="homomorphism"):
        action_algebroid(SO3, fields, XYZ)


@given(polys(("x", "y"), max_terms=3), polys(("x", "y"), max_terms=3))
def test_leibniz_rule(f, g):
    A = AlgebroidData.from_dicts(Chart(["x", "y"]), ["a", "b"], {"a": {"x": "x"}, "b": {"y": "x"}},
                                 {("a", "b"): {"b": 1}})
    got = A.bracket({"a": f}, {"b": g})
    # [f a, g b] = f g [a, b] + f rho(a)(g) b - g rho(b)(f) a
    x, y = sp.symbols("x y")
    F, G = to_sympy(f), to_sympy(g)
    want_b = F * G + F * x * sp.diff(G, x)
    want_a = -G * x * sp.diff(F, y)
    assert got.get("a", Scalar()) == from_sympy(want_a)
    assert got.get("b", Scalar()) == from_sympy(want_b)


@pytest.mark.parametrize("A", [SO3, SHEAR, EX, tangent_bundle_algebroid(Chart(["x", "y"]))],
                         ids=["so3", "shear", "nonint", "TR2"])
def test_tangent_prolongation_satisfies_axioms(A):
    T = tangent_algebroid(A)
    assert check_axioms(T).passed
    assert T.rank == 2 * A.rank and T.base.dim == 2 * A.base.dim


def test_tangent_prolongation_brackets():
    T = tangent_algebroid(SHEAR)
    assert T.frame == ("s", "s_t")
    assert T.rho("s").as_dict() == {"y": Scalar.var("x"), "y_t": Scalar.var("x_t")}
    assert T.rho("s_t").as_dict() == {"y_t": Scalar.var("x")}


@given(polys(("x", "y"), max_terms=3, max_deg=2))
def test_cotangent_of_planar_poisson_is_an_algebroid(f):
    pi = PoissonData.from_brackets(Chart(["x", "y"]), {("x", "y"): f})
    assert check_axioms(cotangent_algebroid(pi)).passed


def test_cotangent_of_algebroid_layout():
    A = AlgebroidData.from_dicts(Chart(["x", "y"]), ["a", "b"], {"a": {"x": "x"}, "b": {"y": "x"}},
                                 {("a", "b"): {"b": 1}})
    T = cotangent_of_algebroid(A)
    assert T.base.coords == ("x", "y", "a_s", "b_s")
    assert T.frame == ("a", "b", "x_s", "y_s")
    assert check_axioms(T).passed


def test_nonint_example_and_closedness():
    assert EX.frame == ("t1", "t2", "c")
    assert EX.bracket({"t1": Scalar.const(1)}, {"t2": Scalar.const(1)}) == {"c": Scalar.var("e")}
    assert check_axioms(EX).passed
    with pytest.raises(AlgebroidError, match="closed"):
        build_nonint_example({("x", "y"): "z"}, ["x", "y", "z"])


def test_jacobi_violation_names_the_triple():
    A = AlgebroidData.from_dicts(Chart([]), ["e1", "e2", "e3"], {}, {
        ("e1", "e2"): {"e3": 1}, ("e2", "e3"): {"e2": 1}})
    rep = check_axioms(A)
    assert not rep.passed
    assert any(v.where.startswith("Jacobi (e1, e2, e3)") for v in rep.violations)


def test_anchor_violation():
    A = AlgebroidData.from_dicts(Chart(["x"]), ["a", "b"], {"a": {"x": 1}, "b": {"x": "x"}})
    rep = check_axioms(A)
    assert [v.where for v in rep.violations] == ["anchor of [a, b] along x"]


def test_tangent_map_is_a_morphism_over_a_nonidentity_base():
    TR = tangent_bundle_algebroid(Chart(["x"]))
    TS = tangent_bundle_algebroid(Chart(["y"]))
    good = PolyMap.from_dict(TR.total_chart, TS.total_chart, {"y": "x^2", "dy": "2*x*dx"})
    bad = PolyMap.from_dict(TR.total_chart, TS.total_chart, {"y": "x^2", "dy": "dx"})
    assert check_morphism(good, TR, TS).passed
    assert not check_morphism(bad, TR, TS).passed


def test_direct_and_dual_morphism_tests_agree():
    A = product_algebroid(SHEAR, AlgebroidData.zero(Chart(["z"]), ["w"]))
    proj = PolyMap.from_dict(A.total_chart, SHEAR.total_chart, {"x": "x", "y": "y", "s": "s"})
    assert check_morphism(proj, A, SHEAR).passed
    assert check_morphism_via_duality(proj, A, SHEAR).passed
    wrong = PolyMap.from_dict(A.total_chart, SHEAR.total_chart, {"x": "x", "y": "y", "s": "s + w"})
    assert not check_morphism_via_duality(wrong, A, SHEAR).passed


def test_duplicate_and_clashing_names_rejected():
    with pytest.raises(AlgebroidError):
        AlgebroidData.zero(Chart(["x"]), ["a", "a"])
    with pytest.raises(AlgebroidError):
        AlgebroidData.zero(Chart(["x"]), ["x"])
