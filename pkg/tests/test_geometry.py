import pytest
import sympy as sp
from hypothesis import given

from oracles import polys, to_sympy
from vbkit.geometry import (Chart, GeometryError, PolyMap, SolveError, VectorField, commutator, compose,
                            pushforward, solve_affine, tangent_chart, tangent_map)
from vbkit.scalar import Scalar

M = Chart(["x", "y", "z"])
X, Y, Z = (sp.Symbol(c) for c in "xyz")


def test_chart_rejects_duplicates():
    with pytest.raises(GeometryError):
        Chart(["x", "x"])


def test_tangent_chart_names():
    assert tangent_chart(Chart(["x", "y"])).coords == ("x", "y", "x_t", "y_t")


@given(polys(), polys(), polys())
def test_jacobian_matches_sympy(f, g, h):
    F = PolyMap(M, M, [f, g, h])
    J = F.jacobian()
    Js = sp.Matrix([to_sympy(c) for c in (f, g, h)]).jacobian([X, Y, Z])
    assert [[to_sympy(v) for v in row] for row in J] == Js.tolist()


@given(polys(), polys(), polys(), polys())
def test_chain_rule(f1, f2, g1, g2):
    N = Chart(["x", "y"])
    F = PolyMap(N, N, [f1.substitute({"z": 0}), f2.substitute({"z": 0})])
    G = PolyMap(N, N, [g1.substitute({"z": 0}), g2.substitute({"z": 0})])
    lhs = tangent_map(compose(G, F))
    rhs = compose(tangent_map(G), tangent_map(F))
    assert lhs == rhs


@given(polys(), polys(), polys(), polys(), polys(), polys())
def test_commutator_matches_sympy(a, b, c, d, e, f):
    U = VectorField(M, [a, b, c])
    V = VectorField(M, [d, e, f])
    W = commutator(U, V)
    us, vs = [to_sympy(s) for s in (a, b, c)], [to_sympy(s) for s in (d, e, f)]
    for k, w in enumerate(W.components):
        ref = sum(us[j] * sp.diff(vs[k], s) - vs[j] * sp.diff(us[k], s) for j, s in enumerate((X, Y, Z)))
        assert to_sympy(w) == sp.expand(ref)


@given(polys(), polys(), polys())
def test_commutator_is_antisymmetric_and_satisfies_jacobi(a, b, c):
    U = VectorField(M, [a, b, Scalar()])
    V = VectorField(M, [Scalar(), c, a])
    W = VectorField(M, [b, Scalar(), c])
    assert commutator(U, V).components == (-commutator(V, U).components[0],
                                           -commutator(V, U).components[1],
                                           -commutator(V, U).components[2])
    j = [commutator(U, commutator(V, W)), commutator(V, commutator(W, U)), commutator(W, commutator(U, V))]
    assert all(not (p + q + r) for p, q, r in zip(*(v.components for v in j)))


def test_pushforward_by_shear():
    N = Chart(["x", "y"])
    f = PolyMap.from_dict(N, N, {"x": "x", "y": "y + x^2"})
    inv = PolyMap.from_dict(N, N, {"x": "x", "y": "y - x^2"})
    dx = VectorField.from_dict(N, {"x": 1})
    assert pushforward(f, dx, inverse=inv).as_dict() == {"x": Scalar.const(1), "y": Scalar.parse("2*x")}


def test_pushforward_rejects_non_projectable():
    N, L = Chart(["x", "y"]), Chart(["x"])
    proj = PolyMap.from_dict(N, L, {"x": "x"})
    sec = PolyMap.from_dict(L, N, {"x": "x", "y": "0"})
    with pytest.raises(GeometryError):
        pushforward(proj, VectorField.from_dict(N, {"x": "y"}), section=sec)


def test_solve_affine():
    eqs = [Scalar.parse("u - x*y"), Scalar.parse("v - u - 1")]
    sol = solve_affine(eqs, ["v", "u"])
    assert sol == {"u": Scalar.parse("x*y"), "v": Scalar.parse("x*y + 1")}
    with pytest.raises(SolveError):
        solve_affine([Scalar.parse("u^2 - x")], ["u"])
