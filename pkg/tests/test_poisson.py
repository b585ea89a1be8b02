import itertools

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from oracles import from_sympy, polys, sympy_bracket, to_sympy
from vbkit.algebroid import AlgebroidData, cotangent_algebroid
from vbkit.geometry import Chart, PolyMap
from vbkit.poisson import (PoissonData, PoissonError, algebroid_to_poisson, check_linear,
                           check_poisson_map, koszul_bracket, poisson_to_algebroid,
                           tangent_lift_poisson)
from vbkit.scalar import Scalar

XYZ = Chart(["x", "y", "z"])
SO3 = AlgebroidData.from_dicts(Chart([]), ["e1", "e2", "e3"], {}, {
    ("e1", "e2"): {"e3": 1}, ("e2", "e3"): {"e1": 1}, ("e3", "e1"): {"e2": 1}})


@given(polys(("x", "y")), polys(("x", "y")))
def test_bracket_matches_sympy(f, g):
    pi = PoissonData.from_brackets(XYZ, {("x", "y"): "z", ("y", "z"): "x", ("z", "x"): "y"})
    syms = {("x", "y"): sp.Symbol("z"), ("y", "z"): sp.Symbol("x"), ("z", "x"): sp.Symbol("y")}
    want = sympy_bracket(syms, XYZ.coords, to_sympy(f), to_sympy(g))
    assert pi.bracket(f, g) == from_sympy(want)


@given(polys(("x",), max_deg=3))
def test_two_dimensional_bivectors_are_poisson(f):
    # any bivector in dimension two satisfies Jacobi
    assert PoissonData.from_brackets(Chart(["x", "y"]), {("x", "y"): f}).jacobi_report().passed


def test_jacobi_failure_is_reported():
    with pytest.raises(PoissonError, match="Jacobi"):
        PoissonData.from_brackets(XYZ, {("x", "y"): "z", ("y", "z"): "y"})
    pi = PoissonData.from_brackets(XYZ, {("x", "y"): "z", ("y", "z"): "y"}, check=False)
    rep = pi.jacobi_report()
    assert not rep.passed
    assert rep.violations[0].where == "Jacobi (x, y, z)"


def test_antisymmetry_enforced():
    with pytest.raises(PoissonError):
        PoissonData(Chart(["x", "y"]), [[0, 1], [1, 0]])


def test_lie_poisson_of_so3():
    pi = algebroid_to_poisson(SO3)
    assert pi.chart.coords == ("e1_s", "e2_s", "e3_s")
    # sum over k of eps_ijk xi_k, expanded from the structure constants
    for i, j in itertools.combinations(range(3), 2):
        k = 3 - i - j
        sign = sp.LeviCivita(i, j, k)
        want = Scalar.var(f"e{k + 1}_s") * int(sign)
        assert pi.entry(i, j) == want
    assert check_linear(pi, pi.chart.coords).passed


def test_linearity_two_ways_agree_on_a_counterexample():
    pi = PoissonData.from_brackets(Chart(["a", "b", "c"]), {("a", "b"): "c^2"})
    rep = check_linear(pi, ["a", "b", "c"])
    assert not rep.passed
    assert rep.details["degree"] is False and rep.details["homothety"] is False
    assert rep.details["failing"] == [["a", "b"]]


def test_affine_is_not_linear():
    pi = PoissonData.from_brackets(Chart(["x", "p", "q"]), {("p", "q"): "1 + p"})
    assert not check_linear(pi, ["p", "q"]).passed
    # base-fiber brackets only need to be basic
    assert check_linear(PoissonData.from_brackets(Chart(["x", "p"]), {("x", "p"): "1 + x"}), ["p"]).passed


def test_roundtrip_algebroid_poisson():
    A = AlgebroidData.from_dicts(Chart(["x", "y"]), ["a", "b"], {"a": {"x": "x"}, "b": {"y": "x"}},
                                 {("a", "b"): {"b": 1}})
    pi = algebroid_to_poisson(A)
    assert poisson_to_algebroid(pi, ["a_s", "b_s"]) == A


def test_poisson_map_scaled():
    pi = PoissonData.from_brackets(Chart(["x", "p"]), {("x", "p"): "x"})
    h = PolyMap.from_dict(pi.chart, pi.chart, {"x": "x", "p": "l*p"})
    assert check_poisson_map(h, pi, pi, "l").passed
    assert not check_poisson_map(h, pi, pi, 1).passed


def _koszul_oracle(entries, coords, i, j):
    # [dz_i, dz_j] = d {z_i, z_j}
    syms = [sp.Symbol(c) for c in coords]
    f = entries.get((coords[i], coords[j]), 0) - entries.get((coords[j], coords[i]), 0)
    return {c: sp.expand(sp.diff(f, s)) for c, s in zip(coords, syms)}


@pytest.mark.parametrize("entries", [
    {("x", "y"): "z", ("y", "z"): "x", ("z", "x"): "y"},
    {("x", "y"): "x*y"},
    {("x", "z"): "x^2", ("y", "z"): "x*y"},
])
def test_cotangent_bracket_is_koszul(entries):
    pi = PoissonData.from_brackets(XYZ, entries)
    T = cotangent_algebroid(pi)
    sym = {k: sp.sympify(v.replace("^", "**")) for k, v in entries.items()}
    for i, j in itertools.combinations(range(3), 2):
        want = {c: from_sympy(v) for c, v in _koszul_oracle(sym, XYZ.coords, i, j).items() if v}
        got = {T.frame[k]: T.c(i, j, k) for k in range(3) if T.c(i, j, k)}
        assert got == {f"{c}_s": v for c, v in want.items()}
        direct = koszul_bracket(pi, {XYZ.coords[i]: 1}, {XYZ.coords[j]: 1})
        assert direct == want


@given(polys(("x", "y"), max_terms=2), polys(("x", "y"), max_terms=2))
def test_koszul_of_exact_forms(f, g):
    pi = PoissonData.from_brackets(Chart(["x", "y"]), {("x", "y"): "x*y"})
    df = {c: f.partial(c) for c in ("x", "y")}
    dg = {c: g.partial(c) for c in ("x", "y")}
    got = koszul_bracket(pi, df, dg)
    h = pi.bracket(f, g)
    assert got == {c: h.partial(c) for c in ("x", "y") if h.partial(c)}


def test_tangent_lift_is_poisson_and_linear():
    pi = algebroid_to_poisson(SO3)
    T = tangent_lift_poisson(pi, fibers=pi.chart.coords)
    assert T.jacobi_report().passed
    assert check_linear(T, [f"e{i}_s_t" for i in (1, 2, 3)]).passed
    # complete lifts bracket to the complete lift, complete with vertical to vertical
    assert T.bracket("e1_s_t", "e2_s_t") == Scalar.var("e3_s_t")
    assert T.bracket("e1_s_t", "e2_s") == Scalar.var("e3_s")
    assert T.bracket("e1_s", "e2_s") == Scalar()


@given(st.lists(st.integers(-2, 2), min_size=3, max_size=3))
def test_tangent_lift_of_constant_structures(cs):
    entries = dict(zip([("x", "y"), ("y", "z"), ("x", "z")], cs))
    pi = PoissonData.from_brackets(XYZ, entries)
    T = tangent_lift_poisson(pi)
    for (a, b), v in entries.items():
        assert T.bracket(f"{a}_t", b) == Scalar.const(v)
        assert T.bracket(a, b) == Scalar()
