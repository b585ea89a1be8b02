"""Named checks that documents can invoke.

Every check takes resolved arguments and a seeded ``random.Random`` and
returns a :class:`~vbkit.report.Report`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from . import names
from .actions import (LAM_COORD, ChartedAction, check_action_axioms, check_commuting, check_lift_equivariance,
                      check_regular, check_reversal, check_tildeh, dual_action_data, reversal,
                      vertical_bundle, vertical_lift_factored)
from .algebroid import AlgebroidData, check_axioms, check_morphism, reorder, tangent_algebroid
from .bialg import BialgebroidData, check_bialgebroid, check_sharp_morphism
from .geometry import PolyMap, tangent_chart
from .groupoid import (VBGroupoidData, check_groupoid_axioms, check_groupoid_morphism,
                       check_right_invariant_brackets, check_vb_groupoid, core_sequence_check,
                       differentiate_action, lie_algebroid_of, lie_functor_fp_check, tangent_groupoid,
                       vertical_lift_groupoid_check)
from .poisson import (PoissonData, algebroid_to_poisson, check_linear, poisson_to_algebroid,
                      tangent_lift_poisson)
from .report import UNFALSIFIED, Report
from .vb import (VBAlgebroidData, base_algebroid, check_double_lie_algebroid, check_dual_double_linear,
                 check_good_pair_vb, check_im_action, check_pvb_algebroid, dual_vb_algebroid,
                 exact_sequence_report, _reorder_poisson)


@dataclass(frozen=True)
class Check:
    kinds: tuple
    fn: Callable
    summary: str


CHECKS: dict = {}


def check(name: str, *kinds: str, summary: str = ""):
    def deco(fn):
        CHECKS[name] = Check(tuple(kinds), fn, summary or (fn.__doc__ or "").strip().splitlines()[0])
        return fn
    return deco


def _alg(x) -> AlgebroidData:
    return x.total if isinstance(x, VBAlgebroidData) else x


def regularity_report(h: ChartedAction, rng) -> Report:
    reg = check_regular(h, rng)
    rep = Report("regular")
    rep.details.update({"kind": reg.kind, "method": reg.method, "samples": reg.samples})
    if reg.witness is not None:
        rep.details["witness"] = {k: str(v) for k, v in sorted(reg.witness.items())}
    if reg.kind == "NonRegular":
        rep.fail("vertical lift vanishes off the fixed locus", str(reg), "Regular")
    elif reg.kind == "Unfalsified":
        rep.verdict = UNFALSIFIED
    return rep


# ---------------------------------------------------------------------------
# actions and double vector bundles


@check("axioms", "any")
def axioms(args, rng) -> Report:
    """Defining identities of any declared structure."""
    (x,) = args
    from .actions import DVB
    from .groupoid import GroupoidData

    if isinstance(x, AlgebroidData):
        return check_axioms(x)
    if isinstance(x, PoissonData):
        return x.jacobi_report()
    if isinstance(x, GroupoidData):
        return check_groupoid_axioms(x)
    if isinstance(x, VBGroupoidData):
        return check_vb_groupoid(x, rng)
    if isinstance(x, VBAlgebroidData):
        rep = Report("vb_algebroid_axioms")
        rep.absorb(check_axioms(x.total), "algebroid")
        return rep.absorb(x.validate(), "vb")
    if isinstance(x, ChartedAction):
        return check_action_axioms(x)
    if isinstance(x, DVB):
        return dvb_check([x], rng)
    raise ValueError(f"no axioms for {type(x).__name__}")


@check("regular", "action")
def regular(args, rng) -> Report:
    """Zeros of the vertical lift lie in the fixed locus."""
    return regularity_report(args[0], rng)


@check("vertical_lift", "action")
def vertical_lift_iso(args, rng) -> Report:
    """The vertical lift is a fiberwise linear bijection onto the vertical bundle."""
    h = args[0]
    reg = check_regular(h, rng)
    V = vertical_bundle(h, reg)
    vel = h.velocity()
    rep = Report("vertical_lift")
    rep.details.update({"regularity": reg.kind, "rank": V.rank, "lift_zero": not any(vel)})
    if not V.lift_bijective:
        rep.fail("vertical lift onto the vertical bundle", "not a fiberwise bijection", "bijection")
    return rep


@check("lift_factorization", "action")
def lift_factorization(args, rng) -> Report:
    """The vertical lift equals dh composed with the inclusion at (0, x)."""
    h = args[0]
    tag = names.free_tag((LAM_COORD,) + h.chart.coords)
    direct = PolyMap(h.chart, tangent_chart(h.chart, tag), h.h0().components + h.velocity())
    factored = vertical_lift_factored(h, tag)
    rep = Report("lift_factorization")
    for c, a, b in zip(direct.target.coords, direct.components, factored.components):
        rep.expect_equal(f"component {c}", a, b)
    return rep.absorb(check_lift_equivariance(h), "equivariance")


@check("dvb", "dvb")
def dvb_check(args, rng) -> Report:
    """Two regular commuting actions."""
    D = args[0]
    rep = Report("dvb")
    rep.absorb(regularity_report(D.h, rng), "h")
    rep.absorb(regularity_report(D.k, rng), "k")
    return rep.absorb(check_commuting(D.h, D.k), "commuting")


@check("tildeh", "dvb")
def tildeh(args, rng) -> Report:
    """Pairing identity and the induced-action formula on both duals and their duals."""
    D = args[0]
    rep = Report("tildeh")
    for side in ("vertical", "horizontal"):
        rep.absorb(check_tildeh(D, side), f"{side}")
        dual = dual_action_data(D, side).dvb
        for side2 in ("vertical", "horizontal"):
            rep.absorb(check_tildeh(dual, side2), f"{side} dual, {side2}")
    return rep


@check("reversal", "algebroid")
def reversal_check(args, rng) -> Report:
    """The reversal of the cotangent double of the underlying bundle."""
    A = args[0]
    return check_reversal(reversal(A.base.coords, A.frame))


# ---------------------------------------------------------------------------
# Poisson and algebroids


@check("linear", "poisson", "name*")
def linear(args, rng) -> Report:
    """Linearity along the given fiber coordinates (both tests)."""
    pi, *fibers = args
    missing = [f for f in fibers if f not in pi.chart.coords]
    if missing:
        raise ValueError(f"unknown fiber coordinates {missing}")
    return check_linear(pi, tuple(fibers))


@check("roundtrip", "algebroid")
def roundtrip(args, rng) -> Report:
    """Algebroid to linear Poisson and back is the identity."""
    A = args[0]
    pi = algebroid_to_poisson(A)
    fibers = pi.chart.coords[A.base.dim:]
    back = poisson_to_algebroid(pi, fibers, dict(zip(fibers, A.frame)))
    rep = Report("roundtrip")
    rep.expect_equal("algebroid", back.describe(), A.describe())
    again = algebroid_to_poisson(back)
    rep.expect_equal("poisson", str(again), str(pi))
    return rep


@check("equal", "any", "any")
def equal(args, rng) -> Report:
    """Two values coincide exactly, chart order included."""
    a, b = args
    rep = Report("equal")
    if hasattr(a, "describe") and hasattr(b, "describe"):
        rep.expect_equal("description", a.describe(), b.describe())
    if a != b and rep.passed:
        rep.fail("value", str(a), str(b))
    return rep


@check("morphism", "map")
def morphism(args, rng) -> Report:
    """An algebroid morphism between the declared source and target."""
    F = args[0]
    return check_morphism(F.map, _alg(F.source), _alg(F.target))


@check("tangent_prolongation", "algebroid")
def tangent_prolongation(args, rng) -> Report:
    """The tangent prolongation is dual to the tangent lift of the dual Poisson structure."""
    A = args[0]
    lhs = algebroid_to_poisson(tangent_algebroid(A))
    rhs = tangent_lift_poisson(algebroid_to_poisson(A))
    ren = {}
    for e in A.frame:
        ren[names.dual(e)] = names.dot(names.dual(e))
        ren[names.dual(names.dot(e))] = names.dual(e)
    lhs = lhs.rename(ren)
    rep = Report("tangent_prolongation")
    if sorted(lhs.chart.coords) != sorted(rhs.chart.coords):
        rep.fail("charts", " ".join(lhs.chart.coords), " ".join(rhs.chart.coords))
        return rep
    lhs = _reorder_poisson(lhs, rhs.chart.coords)
    for (a, b), v in sorted(rhs.brackets().items()):
        rep.expect_equal(f"{{{a}, {b}}}", lhs.entry(lhs.chart.index(a), lhs.chart.index(b)), v)
    for (a, b), v in sorted(lhs.brackets().items()):
        if (a, b) not in rhs.brackets():
            rep.expect_equal(f"{{{a}, {b}}}", v, 0)
    return rep


# ---------------------------------------------------------------------------
# VB-algebroids


@check("im_action", "vbalgebroid")
def im_action(args, rng) -> Report:
    """Each h_l is an algebroid morphism."""
    V = args[0]
    return check_im_action(V.total, V.action)


@check("dual_double_linear", "vbalgebroid")
def dual_double_linear(args, rng) -> Report:
    """The dual linear Poisson structure is linear along the C* fibration too."""
    return check_dual_double_linear(args[0])


@check("vb_criterion", "vbalgebroid")
def vb_criterion(args, rng) -> Report:
    """The IM test and the double-linearity test agree, component by component."""
    V = args[0]
    a = check_im_action(V.total, V.action)
    b = check_dual_double_linear(V)
    rep = Report("vb_criterion")
    rep.details.update({"im_action": a.verdict, "dual_double_linear": b.verdict,
                        "components": a.details["components"]})
    rep.expect_equal("verdicts", a.verdict, b.verdict)
    rep.expect_equal("failing components", a.details["components"], b.details["components"])
    return rep


@check("dual_involution", "vbalgebroid")
def dual_involution(args, rng) -> Report:
    """Dualising twice returns the original VB-algebroid."""
    V = args[0]
    D = dual_vb_algebroid(V)
    DD = dual_vb_algebroid(D)
    rep = Report("dual_involution")
    rep.absorb(check_axioms(D.total), "dual axioms")
    rep.absorb(check_im_action(D.total, D.action), "dual IM")
    rep.absorb(check_dual_double_linear(D), "dual double linear")
    # names coming back through a clash are matched by position
    ren = dict(zip(DD.side_coords, V.side_coords))
    ren.update(zip(DD.core_frame, V.core_frame))
    back = reorder(DD.total.rename({k: v for k, v in ren.items() if k != v}),
                   V.total.base.coords, V.total.frame)
    rep.details["renamed"] = {k: v for k, v in sorted(ren.items()) if k != v}
    rep.expect_equal("double dual", back.describe(), V.total.describe())
    rep.expect_equal("double dual weights", {ren.get(c, c): w for c, w in DD.weights().items()}, V.weights())
    return rep


@check("base_algebroid", "vbalgebroid", "algebroid")
def base_algebroid_check(args, rng) -> Report:
    """The fixed-locus algebroid equals the given one."""
    V, A = args
    rep = Report("base_algebroid")
    rep.expect_equal("base", base_algebroid(V).describe(), A.describe())
    return rep


@check("pvb", "vbalgebroid", "poisson")
def pvb(args, rng) -> Report:
    """PVB-algebroid conditions."""
    return check_pvb_algebroid(*args)


@check("double_lie", "dvb", "algebroid", "algebroid")
def double_lie(args, rng) -> Report:
    """Double Lie algebroid conditions for horizontal and vertical structures."""
    return check_double_lie_algebroid(*args)


@check("good_pair", "map", "map")
def good_pair(args, rng) -> Report:
    """Constant-rank criterion for two maps into the same bundle."""
    F1, F2 = args
    v = check_good_pair_vb(F1.map, F1.source, F2.map, F2.source, F1.target, rng)
    rep = Report("good_pair")
    rep.details.update(v.to_json())
    if not v.good:
        at = "" if v.witness is None else " at " + ", ".join(f"{k}={x}" for k, x in sorted(v.witness.items()))
        rep.fail("rank of the difference map", f"generic rank {v.generic_rank}, {v.verdict}{at}", "constant")
        if v.verdict == "unfalsified":
            rep.verdict = UNFALSIFIED
    return rep


@check("exact_sequence", "map", "map")
def exact_sequence(args, rng) -> Report:
    """Exactness of the tangent and fiber sequences of a fibred product."""
    F1, F2 = args
    return exact_sequence_report(F1.map, F1.source, F2.map, F2.source, F1.target, rng)


# ---------------------------------------------------------------------------
# bialgebroids


def _pair(A, S) -> BialgebroidData:
    if len(A.frame) != len(S.frame):
        raise ValueError("A and A* must have the same rank")
    return BialgebroidData(A, S, dict(zip(A.frame, S.frame)))


@check("bialgebroid", "algebroid", "algebroid")
def bialgebroid(args, rng) -> Report:
    """Lie bialgebroid compatibility (frames paired in order)."""
    return check_bialgebroid(_pair(*args))


@check("bialgebroid_symmetry", "algebroid", "algebroid")
def bialgebroid_symmetry(args, rng) -> Report:
    """The verdict does not depend on the order of the pair."""
    B = _pair(*args)
    a, b = check_bialgebroid(B), check_bialgebroid(B.swapped())
    rep = Report("bialgebroid_symmetry")
    rep.details.update({"forward": a.verdict, "swapped": b.verdict})
    rep.expect_equal("verdicts", a.verdict, b.verdict)
    return rep


@check("sharp_morphism", "algebroid", "algebroid")
def sharp_morphism(args, rng) -> Report:
    """pi^# is an algebroid map from the cotangent to the tangent prolongation."""
    return check_sharp_morphism(_pair(*args))


@check("sharp_agreement", "algebroid", "algebroid")
def sharp_agreement(args, rng) -> Report:
    """The bialgebroid verdict agrees with the pi^# morphism verdict."""
    B = _pair(*args)
    a = check_bialgebroid(B, require_axioms=False)
    b = check_sharp_morphism(B)
    rep = Report("sharp_agreement")
    rep.details.update({"bialgebroid": a.verdict, "sharp_morphism": b.verdict})
    rep.expect_equal("verdicts", a.verdict, b.verdict)
    return rep


# ---------------------------------------------------------------------------
# groupoids


@check("groupoid_morphism", "gmorphism")
def groupoid_morphism(args, rng) -> Report:
    """Compatibility with all structure maps."""
    F = args[0]
    return check_groupoid_morphism(F.morphism, F.source, F.target)


@check("lie_functor", "groupoid", "algebroid")
def lie_functor(args, rng) -> Report:
    """The Lie algebroid of the groupoid is the given algebroid."""
    G, A = args
    L = lie_algebroid_of(G, check=False)
    rep = Report("lie_functor")
    rep.absorb(check_axioms(L), "axioms")
    rep.absorb(check_right_invariant_brackets(G, L), "right-invariant")
    rep.expect_equal("algebroid", L.describe(), A.describe())
    return rep


@check("core_sequence", "vbgroupoid")
def core_sequence(args, rng) -> Report:
    """Exactness of the core sequence."""
    return core_sequence_check(args[0], rng)


@check("diff_action", "vbgroupoid")
def diff_action(args, rng) -> Report:
    """Differentiating the action: IM, fixed locus, regularity."""
    return differentiate_action(args[0], rng)[2]


@check("diff_regular", "vbgroupoid")
def diff_regular(args, rng) -> Report:
    """Regularity is preserved and reflected by differentiation."""
    V = args[0]
    A, hp, _ = differentiate_action(V, rng)
    a, b = check_regular(V.action, rng), check_regular(hp, rng)
    rep = Report("diff_regular")
    rep.details.update({"groupoid": a.kind, "algebroid": b.kind})
    rep.expect_equal("regularity", a.kind, b.kind)
    return rep


@check("vertical_lift_groupoid", "vbgroupoid")
def vertical_lift_groupoid(args, rng) -> Report:
    """The vertical lift is a groupoid map, equivariant, iso iff regular."""
    V = args[0]
    return vertical_lift_groupoid_check(V.groupoid, V.action, V.object_action, rng)


@check("tangent_scaling", "groupoid")
def tangent_scaling(args, rng) -> Report:
    """Differentiating the scaling on the tangent groupoid gives the tangent prolongation."""
    G = args[0]
    T = tangent_groupoid(G)
    aw = {c: int(c not in G.arrows.coords) for c in T.arrows.coords}
    ow = {c: int(c not in G.objects.coords) for c in T.objects.coords}
    V = VBGroupoidData.from_weights(T, aw, ow)
    A, hp, rep = differentiate_action(V, rng)
    out = Report("tangent_scaling")
    out.absorb(rep, "differentiation")
    out.absorb(regularity_report(hp, rng), "regular")
    LG = lie_algebroid_of(G)
    VA = VBAlgebroidData(A, hp)
    out.expect_equal("fixed locus", base_algebroid(VA).describe(), LG.describe())
    flipped = A.rename({c: names.flip_dots(c) for c in A.total_chart.coords})
    out.expect_equal("tangent prolongation up to j", flipped.describe(), tangent_algebroid(LG).describe())
    return out


@check("lie_functor_fp", "gmorphism", "gmorphism")
def lie_functor_fp(args, rng) -> Report:
    """Lie of a fibred product is the fibred product of the Lie algebroids."""
    F1, F2 = args
    return lie_functor_fp_check(F1.morphism, F1.source, F2.morphism, F2.source, F1.target)


def run_check(kind: str, args, rng: random.Random) -> Report:
    return CHECKS[kind].fn(args, rng)
