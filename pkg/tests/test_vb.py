import random

import pytest

from vbkit.actions import DVB
from vbkit.algebroid import (AlgebroidData, build_nonint_example, check_axioms, cotangent_of_algebroid,
                             tangent_algebroid, tangent_bundle_algebroid)
from vbkit.geometry import Chart, PolyMap
from vbkit.poisson import PoissonData
from vbkit.scalar import Scalar
from vbkit.vb import (VBAlgebroidData, VBError, base_algebroid, check_double_lie_algebroid,
                      check_dual_double_linear, check_good_pair_vb, check_im_action, check_pvb_algebroid,
                      dual_vb_algebroid, exact_sequence_report, fibred_product_algebroid, kernel_vb)

EX_W = {"e": 1, "c": 1}
A2 = AlgebroidData.from_dicts(Chart(["x", "y"]), ["a", "b"], {"a": {"x": "x"}, "b": {"y": "x"}},
                              {("a", "b"): {"b": 1}})


def ex413(power=1):
    return VBAlgebroidData.from_weights(build_nonint_example({("x", "y"): 1}, ["x", "y"], power=power), EX_W)


def test_nonint_vb_algebroid():
    V = ex413()
    assert V.validate().passed
    assert V.core_frame == ("c",) and V.side_frame == ("t1", "t2")
    assert V.side_coords == ("e",) and V.base_coords == ("x", "y")
    assert base_algebroid(V) == tangent_bundle_algebroid(Chart(["x", "y"]), ["t1", "t2"])


def test_nonint_dual():
    D = dual_vb_algebroid(ex413())
    assert D.total.base.coords == ("x", "y", "c_s")
    assert D.total.frame == ("t1", "t2", "e_s")
    assert D.total.bracket({"t1": 1}, {"t2": 1}) == {"e_s": -Scalar.var("c_s")}
    assert check_axioms(D.total).passed
    assert D.validate().passed


def test_weight_broken_variant_fails_on_both_sides_at_the_same_component():
    V = ex413(power=2)
    im = check_im_action(V.total, V.action)
    dl = check_dual_double_linear(V)
    assert not im.passed and not dl.passed
    assert im.details["components"] == dl.details["components"] == ["bracket(t1,t2;c)"]
    with pytest.raises(VBError):
        dual_vb_algebroid(V)


def test_bad_anchor_weight_is_seen_on_both_sides():
    A = AlgebroidData.from_dicts(Chart(["x", "e"]), ["t", "c"], {"t": {"x": "e"}})
    V = VBAlgebroidData.from_weights(A, {"e": 1, "c": 1})
    im = check_im_action(V.total, V.action)
    dl = check_dual_double_linear(V)
    assert not im.passed and not dl.passed
    assert im.details["components"] == dl.details["components"] == ["anchor(t;x)"]


def test_tangent_prolongation_is_a_vb_algebroid_with_cotangent_dual():
    T = tangent_algebroid(A2)
    V = VBAlgebroidData.from_weights(T, {"x_t": 1, "y_t": 1, "a_t": 1, "b_t": 1})
    assert V.validate().passed
    assert base_algebroid(V) == A2
    D = dual_vb_algebroid(V).total
    C = cotangent_of_algebroid(A2)
    ren = {"a_t_s": "a_s", "b_t_s": "b_s", "x_t_s": "x_s", "y_t_s": "y_s"}
    assert D.rename(ren) == C


def test_dual_is_an_involution_on_nonint():
    V = ex413()
    DD = dual_vb_algebroid(dual_vb_algebroid(V))
    # dual names toggle, so the double dual comes back under the original names
    assert DD.total == V.total
    assert DD.weights() == V.weights()


def _line(frame):
    return AlgebroidData.zero(Chart(["x"]), frame)


def test_rank_jump_is_not_a_good_pair():
    U, W, Z = _line(["u"]), _line(["w"]), _line([])
    squeeze = PolyMap.from_dict(U.total_chart, W.total_chart, {"x": "x", "w": "x*u"})
    zero = PolyMap.from_dict(Z.total_chart, W.total_chart, {"x": "x", "w": "0"})
    v = check_good_pair_vb(squeeze, U, zero, Z, W, random.Random(0))
    assert not v.good and v.verdict == "falsified"
    assert {k: str(x) for k, x in v.witness.items()} == {"x": "0"}
    rep = exact_sequence_report(squeeze, U, zero, Z, W, random.Random(0))
    assert not rep.passed
    assert any("x=0" in vi.lhs for vi in rep.violations)


def test_kernel_of_projection():
    TRu = AlgebroidData.from_dicts(Chart(["x"]), ["dx", "u"], {"dx": {"x": 1}})
    TR = tangent_bundle_algebroid(Chart(["x"]))
    V1 = VBAlgebroidData.from_weights(TRu, {"u": 1})
    V2 = VBAlgebroidData.from_weights(TR, {})
    proj = PolyMap.from_dict(TRu.total_chart, TR.total_chart, {"x": "x", "dx": "dx"})
    K = kernel_vb(proj, V1, V2)
    assert K.total.frame == ("u",)
    assert check_axioms(K.total).passed


def test_fibred_product_of_tangent_projections():
    TR2 = tangent_bundle_algebroid(Chart(["x", "y"]))
    TR = tangent_bundle_algebroid(Chart(["x"]))
    f = PolyMap.from_dict(TR2.total_chart, TR.total_chart, {"x": "x", "dx": "dx"})
    g = PolyMap.identity(TR.total_chart)
    P = fibred_product_algebroid(f, TR2, g, TR, TR)
    assert check_axioms(P).passed
    assert P.rank == 2 and P.base.dim == 2
    assert exact_sequence_report(f, TR2, g, TR, TR).passed


def test_canonical_cotangent_structure_is_pvb():
    T = cotangent_of_algebroid(A2)
    V = VBAlgebroidData.from_weights(T, {c: 1 for c in ("a_s", "b_s", "x_s", "y_s")})
    canon = {("x", "x_s"): 1, ("y", "y_s"): 1, ("a", "a_s"): 1, ("b", "b_s"): 1}
    pi = PoissonData.from_brackets(T.total_chart, canon)
    assert check_pvb_algebroid(V, pi).passed
    rev = {("x", "x_s"): 1, ("y", "y_s"): 1, ("a_s", "a"): 1, ("b_s", "b"): 1}
    rep = check_pvb_algebroid(V, PoissonData.from_brackets(T.total_chart, rev))
    assert not rep.passed
    assert all(v.where.startswith("(b)") for v in rep.violations)
    bent = dict(canon)
    bent[("x_s", "y_s")] = 1
    rep = check_pvb_algebroid(V, PoissonData.from_brackets(T.total_chart, bent))
    assert any(v.where.startswith("(a)") for v in rep.violations)


def _double_tangent():
    D = DVB(Chart(["x", "x_t", "dx", "dx_t"]), [0, 1, 0, 1], [0, 0, 1, 1])
    TR = tangent_bundle_algebroid(Chart(["x"]))
    return D, tangent_algebroid(TR)


def test_double_tangent_is_a_double_lie_algebroid():
    D, horizontal = _double_tangent()
    # vertical structure: T(TR) => TR, the tangent bundle of TR in its own frame
    vertical = tangent_bundle_algebroid(Chart(["x", "dx"]), ["x_t", "dx_t"])
    assert check_double_lie_algebroid(D, horizontal, vertical).passed


def test_perturbed_double_structures_fail_at_the_predicted_sub_check():
    D, horizontal = _double_tangent()
    bad_anchor = AlgebroidData.from_dicts(Chart(["x", "dx"]), ["x_t", "dx_t"],
                                          {"x_t": {"x": 1}, "dx_t": {"dx": "1 + dx"}})
    rep = check_double_lie_algebroid(D, horizontal, bad_anchor)
    assert rep.violations and all(v.where.startswith("(i)") for v in rep.violations)
    twist = AlgebroidData.from_dicts(Chart(["x", "dx"]), ["x_t", "dx_t"],
                                     {"x_t": {"x": 1}}, {("x_t", "dx_t"): {"dx_t": 1}})
    rep = check_double_lie_algebroid(D, horizontal, twist)
    assert rep.violations and all(v.where.startswith("(ii)") for v in rep.violations)
