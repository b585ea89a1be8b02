import random

import pytest
from hypothesis import given, strategies as st

from vbkit.actions import (DVB, ChartedAction, check_action_axioms, check_commuting,
                           check_lift_equivariance, check_regular, check_reversal, check_tildeh,
                           dual_action_data, fixed_locus, reversal, vertical_bundle, vertical_lift,
                           vertical_lift_factored)
from vbkit.geometry import Chart, PolyMap
from vbkit.scalar import Scalar

C4 = Chart(["x", "y", "u", "v"])
weights = st.dictionaries(st.sampled_from(C4.coords), st.integers(0, 3))


@given(weights)
def test_regularity_dichotomy(w):
    h = ChartedAction.diagonal(C4, w)
    reg = check_regular(h, random.Random(0))
    if all(v <= 1 for v in w.values()):
        assert reg.kind == "Regular"
    else:
        assert reg.kind == "NonRegular"
        pt = reg.witness
        assert not any(v.evaluate(pt) for v in h.velocity())
        assert [c.evaluate(pt) for c in h.h0().components] != [pt[z] for z in C4.coords]


@given(weights)
def test_diagonal_actions_satisfy_the_axioms(w):
    assert check_action_axioms(ChartedAction.diagonal(C4, w)).passed


@given(weights)
def test_lift_factorization(w):
    h = ChartedAction.diagonal(C4, w)
    assert vertical_lift(h).components == vertical_lift_factored(h).components
    assert check_lift_equivariance(h).passed


@given(st.dictionaries(st.sampled_from(C4.coords), st.integers(0, 1)))
def test_vertical_lift_is_a_fiberwise_bijection_when_regular(w):
    h = ChartedAction.diagonal(C4, w)
    V = vertical_bundle(h)
    assert V.lift_bijective
    assert V.rank == sum(w.values())


def test_weight_two_lift_vanishes_on_a_rank_one_bundle():
    h = ChartedAction.diagonal(Chart(["x"]), {"x": 2})
    assert check_regular(h).kind == "NonRegular"
    assert not any(h.velocity())
    V = vertical_bundle(h)
    assert V.rank == 1 and V.lift_bijective is None


def test_non_diagonal_regular_action():
    # homothety of y - x^2 along y
    h = ChartedAction.general(Chart(["x", "y"]), {"x": "x", "y": "l*y + x^2 - l*x^2"})
    assert check_action_axioms(h).passed
    assert not h.detect_diagonal().is_diagonal
    assert check_regular(h, random.Random(1)).kind == "Regular"
    assert fixed_locus(h).as_dict() == {"y": Scalar.parse("x^2")}
    assert vertical_bundle(h).lift_bijective


def test_non_action_fails_axioms():
    h = ChartedAction.general(Chart(["x", "y"]), {"x": "x", "y": "l*y + l^2*x"})
    assert not check_action_axioms(h).passed


def test_commuting_and_not():
    ch = Chart(["x", "y"])
    h = ChartedAction.diagonal(ch, {"x": 1})
    k = ChartedAction.diagonal(ch, {"y": 1})
    assert check_commuting(h, k).passed
    tw = ChartedAction.general(ch, {"x": "l*x", "y": "y + x - l*x"})
    assert check_action_axioms(tw).passed
    assert not check_commuting(tw, k).passed


bidegree = st.sampled_from([(0, 0), (1, 0), (0, 1), (1, 1)])


@given(st.lists(bidegree, min_size=1, max_size=5))
def test_tildeh_on_random_dvbs(bds):
    ch = Chart([f"z{i}" for i in range(len(bds))])
    D = DVB.from_weights(ch, {c: b[0] for c, b in zip(ch.coords, bds)},
                         {c: b[1] for c, b in zip(ch.coords, bds)})
    for side in ("vertical", "horizontal"):
        assert check_tildeh(D, side).passed
        dual = dual_action_data(D, side).dvb
        for side2 in ("vertical", "horizontal"):
            assert check_tildeh(dual, side2).passed


def test_dvb_sides_and_core():
    D = DVB.from_weights(Chart(["x", "a", "e", "c"]), {"e": 1, "c": 1}, {"a": 1, "c": 1})
    assert D.base == ("x",) and D.a_side == ("a",) and D.e_side == ("e",) and D.core == ("c",)


@pytest.mark.parametrize("base,fibers", [(("x",), ("dx",)), (("x", "y"), ("e",)), ((), ("e1", "e2", "e3"))])
def test_reversal(base, fibers):
    R = reversal(base, fibers)
    assert check_reversal(R).passed
    assert R.map.apply([Scalar.var(c) for c in R.source.chart.coords]) == tuple(R.map.components)


def test_reversal_without_sign_fails():
    R = reversal(("x",), ("dx",))
    comps = [(-c if str(c).startswith("-") else c) for c in R.map.components]
    bad = type(R)(R.base, R.fibers, R.source, R.target, PolyMap(R.map.source, R.map.target, comps))
    assert not check_reversal(bad).passed


def test_action_must_extend_to_zero():
    h = ChartedAction.general(Chart(["x"]), {"x": "l^-1*x"})
    assert not check_action_axioms(h).passed
