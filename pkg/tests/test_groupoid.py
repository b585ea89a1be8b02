import random

import pytest
import sympy as sp

from oracles import from_sympy
from vbkit.actions import ChartedAction
from vbkit.algebroid import AlgebroidData, check_axioms, tangent_algebroid, tangent_bundle_algebroid
from vbkit.geometry import Chart, PolyMap
from vbkit.groupoid import (GroupoidError, GroupoidMorphism, VBGroupoidData, check_groupoid_axioms,
                            check_groupoid_morphism, check_right_invariant_brackets, check_vb_groupoid,
                            core_of, core_sequence_check, differentiate_action, fibred_product_groupoid,
                            from_maps, lie_algebroid_of, lie_functor_fp_check, lie_of_morphism,
                            pair_groupoid, right_invariant_field, tangent_groupoid,
                            vertical_lift_groupoid_check)

SHEAR = from_maps(["x", "y"], ["s", "u", "v"],
                  source={"x": "u", "y": "v"}, target={"x": "u", "y": "v + s*u"},
                  unit={"s": 0, "u": "x", "v": "y"}, inverse={"s": "-s", "u": "u", "v": "v + s*u"},
                  mult={"s": "s + s__2", "u": "u__2", "v": "v__2"})
HEIS = from_maps([], ["p", "q", "r"], source={}, target={}, unit={"p": 0, "q": 0, "r": 0},
                 inverse={"p": "-p", "q": "-q", "r": "-r + p*q"},
                 mult={"p": "p + p__2", "q": "q + q__2", "r": "r + r__2 + p*q__2"})


@pytest.mark.parametrize("G", [pair_groupoid(["x"]), pair_groupoid(["x", "y"]), SHEAR, HEIS,
                               tangent_groupoid(pair_groupoid(["x"])), tangent_groupoid(SHEAR)],
                         ids=["pairR", "pairR2", "shear", "heisenberg", "Tpair", "Tshear"])
def test_axioms(G):
    assert check_groupoid_axioms(G).passed


def test_broken_multiplication():
    bad = from_maps(["x"], ["p", "q"], source={"x": "q"}, target={"x": "p"}, unit={"p": "x", "q": "x"},
                    inverse={"p": "q", "q": "p"}, mult={"p": "p", "q": "q"})
    rep = check_groupoid_axioms(bad)
    assert not rep.passed


def test_source_must_be_a_projection():
    with pytest.raises(GroupoidError, match="projection"):
        from_maps(["x"], ["p", "q"], source={"x": "q + p"}, target={"x": "p"}, unit={"p": "x", "q": "x"},
                  inverse={"p": "q", "q": "p"}, mult={"p": "p", "q": "q__2"})


def test_lie_of_pair_groupoids_is_the_tangent_bundle():
    assert lie_algebroid_of(pair_groupoid(["x"])) == tangent_bundle_algebroid(Chart(["x"]), ["p"])
    assert lie_algebroid_of(pair_groupoid(["x", "y"])) == tangent_bundle_algebroid(Chart(["x", "y"]), ["p1", "p2"])


def test_lie_of_shear_groupoid_is_the_action_algebroid():
    A = lie_algebroid_of(SHEAR)
    assert A == AlgebroidData.from_dicts(Chart(["x", "y"]), ["s"], {"s": {"y": "x"}})


def _sympy_right_invariant(mult, arrows, n):
    # d/de m(e * d_n, g) at e = 0, over a point
    e = sp.Symbol("eps")
    sub = {sp.Symbol(c): (e if c == n else 0) for c in arrows}
    sub.update({sp.Symbol(c + "__2"): sp.Symbol(c) for c in arrows})
    return [sp.expand(sp.diff(sp.sympify(m).subs(sub, simultaneous=True), e).subs(e, 0)) for m in mult]


def test_heisenberg_brackets_match_the_commutator_oracle():
    arrows = ("p", "q", "r")
    mult = ["p + p__2", "q + q__2", "r + r__2 + p*q__2"]
    syms = [sp.Symbol(c) for c in arrows]
    X = {n: _sympy_right_invariant(mult, arrows, n) for n in arrows}
    for n in arrows:
        assert list(right_invariant_field(HEIS, n).components) == [from_sympy(c) for c in X[n]]

    def comm(A, B):
        return [sp.expand(sum(A[j] * sp.diff(B[i], syms[j]) - B[j] * sp.diff(A[i], syms[j]) for j in range(3)))
                for i in range(3)]

    # [X_p, X_q] = -X_r, so the algebra has [p, q] = -r
    assert comm(X["p"], X["q"]) == [-c for c in X["r"]]
    L = lie_algebroid_of(HEIS)
    assert L.bracket({"p": 1}, {"q": 1}) == {"r": from_sympy(sp.Integer(-1))}
    assert check_right_invariant_brackets(HEIS, L).passed


def test_wrong_algebroid_fails_right_invariance():
    wrong = AlgebroidData.from_dicts(Chart([]), ["p", "q", "r"], {}, {("p", "q"): {"r": 1}})
    assert not check_right_invariant_brackets(HEIS, wrong).passed


def test_lie_functor_commutes_with_tangents():
    for G in (pair_groupoid(["x"]), SHEAR):
        assert lie_algebroid_of(tangent_groupoid(G)) == tangent_algebroid(lie_algebroid_of(G))


def _tangent_scaling(G):
    T = tangent_groupoid(G)
    aw = {c: int(c not in G.arrows.coords) for c in T.arrows.coords}
    ow = {c: int(c not in G.objects.coords) for c in T.objects.coords}
    return VBGroupoidData.from_weights(T, aw, ow)


def test_tangent_scaling_differentiates_to_a_regular_im_action():
    V = _tangent_scaling(SHEAR)
    assert check_vb_groupoid(V).passed
    A, hp, rep = differentiate_action(V, random.Random(0))
    assert rep.passed
    assert rep.details == {"regular_groupoid": "Regular", "regular_algebroid": "Regular"}


def test_core_of_pair_vb_groupoid():
    G = pair_groupoid(["x", "y"])
    V = VBGroupoidData.from_weights(G, {"p2": 1, "q2": 1}, {"y": 1})
    assert check_vb_groupoid(V).passed
    assert core_of(V).fibers == ("p2",)
    rep = core_sequence_check(V)
    assert rep.passed
    assert (rep.details["core_rank"], rep.details["side_rank"], rep.details["fiber_rank"]) == (1, 1, 2)


def test_square_weights_are_multiplicative_but_not_regular():
    V = VBGroupoidData.from_weights(SHEAR, {"u": 2, "v": 2}, {"x": 2, "y": 2})
    rep = check_vb_groupoid(V)
    assert rep.details["regularity"] == "NonRegular" and not rep.passed
    _, _, d = differentiate_action(V)
    assert d.details == {"regular_groupoid": "NonRegular", "regular_algebroid": "NonRegular"}
    vl = vertical_lift_groupoid_check(SHEAR, V.action, V.object_action)
    assert vl.passed and vl.details["lift_iso"] is False


def test_vertical_lift_of_regular_action_is_an_isomorphism():
    G = pair_groupoid(["x", "y"])
    h = ChartedAction.diagonal(G.arrows, {"p2": 1, "q2": 1})
    hM = ChartedAction.diagonal(G.objects, {"y": 1})
    rep = vertical_lift_groupoid_check(G, h, hM)
    assert rep.passed and rep.details["lift_iso"] is True


def test_fibred_product_and_lie_functor():
    R2, R = pair_groupoid(["x", "y"]), pair_groupoid(["x"])
    C = from_maps(["x"], ["P", "Q"], source={"x": "Q"}, target={"x": "P"}, unit={"P": "x", "Q": "x"},
                  inverse={"P": "Q", "Q": "P"}, mult={"P": "P", "Q": "Q__2"})
    forget = GroupoidMorphism(PolyMap.from_dict(R2.arrows, C.arrows, {"P": "p1", "Q": "q1"}),
                              PolyMap.from_dict(R2.objects, C.objects, {"x": "x"}))
    same = GroupoidMorphism(PolyMap.from_dict(R.arrows, C.arrows, {"P": "p", "Q": "q"}),
                            PolyMap.from_dict(R.objects, C.objects, {"x": "x"}))
    assert check_groupoid_morphism(forget, R2, C).passed
    FP, _ = fibred_product_groupoid(forget, R2, same, R, C)
    assert check_groupoid_axioms(FP).passed
    assert lie_functor_fp_check(forget, R2, same, R, C).passed
    phi = lie_of_morphism(forget, R2, C)
    assert [str(c) for c in phi.components] == ["x", "p1"]
    flipped = GroupoidMorphism(PolyMap.from_dict(R.arrows, C.arrows, {"P": "q", "Q": "p"}),
                               PolyMap.from_dict(R.objects, C.objects, {"x": "x"}))
    assert not check_groupoid_morphism(flipped, R, C).passed


def test_fixed_subgroupoid_of_pair_vb_groupoid_is_the_base():
    G = pair_groupoid(["x", "y"])
    V = VBGroupoidData.from_weights(G, {"p2": 1, "q2": 1}, {"y": 1})
    A, hp, rep = differentiate_action(V)
    assert rep.passed
    assert check_axioms(A).passed
