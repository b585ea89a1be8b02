"""Actions of the multiplicative monoid of reals on charts.

An action is stored either as diagonal weights (coordinate ``z`` scales by
``l**w``) or as a general polynomial family in the chart coordinates and the
parameter ``l``.  Everything here is checked as exact polynomial identities,
with a second parameter ``MU`` used for the composition law.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from . import names
from .names import free_tag
from .geometry import (Chart, PolyMap, SolvedSubmanifold, compose,
                       tangent_chart, tangent_map)
from .linalg import certify_rank, kernel_fractions, evaluate_matrix, sample_points
from .report import Report
from .scalar import LAMBDA, ONE, PARAM, ZERO, Scalar

MU = "μ"
"""Second parameter used when checking ``h_l h_mu = h_{l mu}``."""

LAM_COORD = "λ"
"""Coordinate name for the parameter when an action is viewed as a map R x D -> D."""


class ActionError(ValueError):
    pass


@dataclass(frozen=True)
class ChartedAction:
    chart: Chart
    weights: tuple | None = None  # diagonal form: one integer per coordinate
    family: tuple | None = None  # general form: one Scalar per coordinate

    def __post_init__(self):
        if (self.weights is None) == (self.family is None):
            raise ActionError("give exactly one of weights / family")

    @classmethod
    def diagonal(cls, chart: Chart, weights: Mapping[str, int] | Iterable[int]) -> "ChartedAction":
        if isinstance(weights, Mapping):
            bad = set(weights) - set(chart.coords)
            if bad:
                raise ActionError(f"weights for unknown coordinates {sorted(bad)}")
            ws = tuple(int(weights.get(c, 0)) for c in chart.coords)
        else:
            ws = tuple(int(w) for w in weights)
        if len(ws) != chart.dim or any(w < 0 for w in ws):
            raise ActionError("need one nonnegative weight per coordinate")
        return cls(chart, weights=ws)

    @classmethod
    def general(cls, chart: Chart, components: Mapping[str, object] | Iterable) -> "ChartedAction":
        if isinstance(components, Mapping):
            comps = [Scalar.lift(components.get(c, c)) for c in chart.coords]
        else:
            comps = [Scalar.lift(c) for c in components]
        if len(comps) != chart.dim:
            raise ActionError("need one component per coordinate")
        for c in comps:
            chart.check_scalar(c, allow_param=True)
        return cls(chart, family=tuple(comps))

    @property
    def is_diagonal(self) -> bool:
        return self.weights is not None

    def weight_map(self) -> dict:
        if self.weights is None:
            raise ActionError("general-form action has no weights")
        return dict(zip(self.chart.coords, self.weights))

    @property
    def components(self) -> tuple:
        if self.family is not None:
            return self.family
        return tuple(LAMBDA ** w * Scalar.var(c) if w else Scalar.var(c)
                     for c, w in zip(self.chart.coords, self.weights))

    def as_map(self) -> PolyMap:
        """``h_l`` as a parameter-dependent polynomial map."""
        return PolyMap(self.chart, self.chart, self.components)

    def at(self, value) -> PolyMap:
        return self.as_map().at_param(value)

    def h0(self) -> PolyMap:
        return self.at(0)

    def velocity(self) -> tuple:
        """``d/dl h_l |_{l=0}`` componentwise."""
        return tuple(c.param_derivative(PARAM).substitute({PARAM: 0}) for c in self.components)

    def detect_diagonal(self) -> "ChartedAction":
        """Return the diagonal form if every component is ``l**w * z``."""
        if self.is_diagonal:
            return self
        ws = []
        for c, z in zip(self.family, self.chart.coords):
            w = None
            for k in range(0, 8):
                if c == LAMBDA ** k * Scalar.var(z):
                    w = k
                    break
            if w is None:
                return self
            ws.append(w)
        return ChartedAction(self.chart, weights=tuple(ws))

    def __str__(self):
        if self.is_diagonal:
            return "weights {" + ", ".join(f"{c}: {w}" for c, w in zip(self.chart.coords, self.weights)) + "}"
        return "family {" + ", ".join(f"{c}: {f}" for c, f in zip(self.chart.coords, self.family)) + "}"


def _param_free_of_negatives(f: Scalar) -> bool:
    return all(e >= 0 for m in f.terms for n, e in m if n == PARAM)


def check_action_axioms(h: ChartedAction) -> Report:
    rep = Report("action_axioms")
    coords = h.chart.coords
    comps = h.components
    for z, c in zip(coords, comps):
        if not _param_free_of_negatives(c):
            rep.fail(f"component {z} is not polynomial in {PARAM}", c, "")
    if not rep.passed:
        return rep  # h_0 is undefined, so composition cannot be tested
    for z, c in zip(coords, comps):
        rep.expect_equal(f"h_1 = id, component {z}", c.substitute({PARAM: 1}), Scalar.var(z))
    inner = {z: c.substitute({PARAM: Scalar.var(MU)}) for z, c in zip(coords, comps)}
    prod = LAMBDA * Scalar.var(MU)
    for z, c in zip(coords, comps):
        lhs = c.substitute(inner)
        rhs = c.substitute({PARAM: prod})
        rep.expect_equal(f"h_l h_mu = h_(l mu), component {z}", lhs, rhs)
    return rep


def fixed_locus(h: ChartedAction) -> SolvedSubmanifold:
    """Image of ``h_0`` in solved form.

    ``h_0`` must be the identity on a set of free coordinates and send the
    others to functions of the free ones; then ``h_0`` is a graph
    parametrisation and its differential has constant rank equal to the
    number of free coordinates everywhere.
    """
    h0 = h.h0()
    coords = h.chart.coords
    free = [z for z, c in zip(coords, h0.components) if c == Scalar.var(z)]
    solved = {z: c for z, c in zip(coords, h0.components) if z not in free}
    for z, c in solved.items():
        if not c.variables() <= set(free):
            raise ActionError(
                f"rank of d h_0 not certifiably constant: h_0[{z}] = {c} involves non-fixed coordinates")
    return SolvedSubmanifold(h.chart, solved)


def vertical_lift(h: ChartedAction, tag: str | None = None) -> PolyMap:
    """``x -> (h_0(x), d/dl h_l(x)|_0)`` into the tangent chart.

    Dots are named with ``tag``, by default ``t`` made collision-free.

    Computed directly and through the factorisation ``dh o l`` with
    ``l(x) = ((0, x), (1, 0))``; the two must agree.
    """
    tag = tag or free_tag(h.chart.coords)
    direct = PolyMap(h.chart, tangent_chart(h.chart, tag), h.h0().components + h.velocity())
    factored = vertical_lift_factored(h, tag)
    if list(direct.components) != list(factored.components):
        raise ActionError("vertical lift disagrees with its factorisation dh o l")
    return direct


def vertical_lift_factored(h: ChartedAction, tag: str | None = None) -> PolyMap:
    """``dh o l`` where ``h`` is viewed as a map ``R x D -> D``."""
    tag = tag or free_tag((LAM_COORD,) + h.chart.coords)
    prod = Chart((LAM_COORD,) + h.chart.coords)
    lam = Scalar.var(LAM_COORD)
    H = PolyMap(prod, h.chart, [c.substitute({PARAM: lam}) for c in h.components])
    dH = tangent_map(H, tag)
    l_map = PolyMap(h.chart, dH.source,
                    [ZERO] + h.chart.variables() + [ONE] + [ZERO] * h.chart.dim)
    return compose(dH, l_map)


@dataclass(frozen=True)
class Regularity:
    kind: str  # "Regular" | "NonRegular" | "Unfalsified"
    method: str
    witness: dict | None = None
    samples: int = 0

    def __bool__(self):
        return self.kind == "Regular"

    def __str__(self):
        if self.kind == "NonRegular":
            pt = ", ".join(f"{k}={v}" for k, v in sorted(self.witness.items()))
            return f"NonRegular(witness: {pt})"
        if self.kind == "Unfalsified":
            return f"Unfalsified({self.samples} samples)"
        return "Regular"


def _is_witness(h: ChartedAction, point: dict) -> bool:
    vel = [v.evaluate(point) for v in h.velocity()]
    if any(vel):
        return False
    fixed = [c.evaluate(point) for c in h.h0().components]
    return fixed != [Fraction(point[z]) for z in h.chart.coords]


def check_regular(h: ChartedAction, rng: random.Random | None = None,
                  samples: int = 1000) -> Regularity:
    """Decide whether zeros of the vertical lift lie in the fixed locus."""
    coords = h.chart.coords
    if h.is_diagonal:
        bad = [z for z, w in zip(coords, h.weights) if w >= 2]
        if not bad:
            return Regularity("Regular", "diagonal")
        witness = {z: Fraction(1 if z == bad[0] else 0) for z in coords}
        return Regularity("NonRegular", "diagonal", witness)
    rng = rng or random.Random(0)
    locus = fixed_locus(h)
    deps = list(locus.dependent)
    vel = h.velocity()
    parts = [v.linear_part(deps) for v in vel]
    if all(p is not None for p in parts) and deps:
        M = [[p[0].get(d, ZERO) for d in deps] for p in parts]
        cert = certify_rank(M, rng, samples)
        if cert.generic_rank == len(deps) and cert.constant:
            return Regularity("Regular", "affine")
        if cert.generic_rank < len(deps) or cert.verdict == "falsified":
            base = cert.witness or {n: Fraction(0) for n in locus.free}
            base = {n: base.get(n, Fraction(0)) for n in locus.free}
            Mv = evaluate_matrix(M, base)
            for vec in kernel_fractions(Mv, len(deps)):
                pt = dict(base)
                for d, val in zip(deps, vec):
                    pt[d] = locus.as_dict()[d].evaluate(base) + val
                if _is_witness(h, pt):
                    return Regularity("NonRegular", "affine", pt)
        # fall through to sampling when no exact verdict was reached
    elif not deps:
        return Regularity("Regular", "affine")
    n = 0
    for pt in sample_points(coords, samples, rng):
        n += 1
        if _is_witness(h, pt):
            return Regularity("NonRegular", "sampled", pt, n)
    return Regularity("Unfalsified", "sampled", None, n)


@dataclass(frozen=True)
class VerticalBundleData:
    base: SolvedSubmanifold
    fiber: tuple  # coordinate directions spanning ker(d h_0) along the base
    lift_bijective: bool | None  # None when the action is not regular

    @property
    def rank(self) -> int:
        return len(self.fiber)


def vertical_bundle(h: ChartedAction, regularity: Regularity | None = None) -> VerticalBundleData:
    locus = fixed_locus(h)
    deps = locus.dependent
    J0 = h.h0().jacobian()
    coords = h.chart.coords
    for d in deps:
        col = [locus.restrict(row[coords.index(d)]) for row in J0]
        if any(col):
            raise ActionError(f"d h_0 does not kill d/d{d} along the fixed locus")
    Jr = [[locus.restrict(x) for x in row] for row in J0]
    cert = certify_rank(Jr)
    if not cert.constant or cert.generic_rank != len(locus.free):
        raise ActionError("rank of d h_0 along the fixed locus is not certifiably constant")
    regularity = regularity or check_regular(h)
    bij = None
    if regularity:
        bij = _lift_is_fiberwise_iso(h, locus)
    return VerticalBundleData(locus, tuple(deps), bij)


def _lift_is_fiberwise_iso(h: ChartedAction, locus: SolvedSubmanifold) -> bool:
    """Exact check that x_D -> V_D(x_F, x_D) is an affine bijection on each fiber."""
    deps = list(locus.dependent)
    vel = dict(zip(h.chart.coords, h.velocity()))
    if any(vel[z] for z in locus.free):
        return False
    if not deps:
        return True
    rows = []
    for d in deps:
        lp = vel[d].linear_part(deps)
        if lp is None:
            return False
        rows.append([lp[0].get(e, ZERO) for e in deps])
    from .linalg import determinant

    det = determinant(rows)
    return bool(det) and det.is_constant()


def check_lift_equivariance(h: ChartedAction) -> Report:
    """``V_h o h_l = dh_l o V_h`` as an identity in ``l``."""
    rep = Report("vertical_lift_equivariance")
    V = vertical_lift(h)
    lhs = V.apply(h.components)
    dh = tangent_map(h.as_map())
    rhs = dh.apply(V.components)
    for z, a, b in zip(V.target.coords, lhs, rhs):
        rep.expect_equal(f"component {z}", a, b)
    return rep


# ---------------------------------------------------------------------------
# double vector bundles


def check_commuting(h: ChartedAction, k: ChartedAction) -> Report:
    rep = Report("commuting")
    if h.chart.coords != k.chart.coords:
        rep.fail("actions on different charts", h.chart.coords, k.chart.coords)
        return rep
    coords = h.chart.coords
    mu = {PARAM: Scalar.var(MU)}
    kmu = {z: c.substitute(mu) for z, c in zip(coords, k.components)}
    hl = dict(zip(coords, h.components))
    for z, hc, kc in zip(coords, h.components, k.components):
        lhs = hc.substitute(kmu)
        rhs = kc.substitute(mu).substitute(hl)
        rep.expect_equal(f"h_l k_mu = k_mu h_l, component {z}", lhs, rhs)
    return rep


@dataclass(frozen=True)
class DVB:
    """Two commuting regular diagonal actions; ``h`` projects to A, ``k`` to E."""

    chart: Chart
    h_weights: tuple
    k_weights: tuple

    @classmethod
    def from_weights(cls, chart: Chart, h: Mapping[str, int], k: Mapping[str, int]) -> "DVB":
        return cls(chart, tuple(h.get(c, 0) for c in chart.coords),
                   tuple(k.get(c, 0) for c in chart.coords))

    @property
    def h(self) -> ChartedAction:
        return ChartedAction(self.chart, weights=self.h_weights)

    @property
    def k(self) -> ChartedAction:
        return ChartedAction(self.chart, weights=self.k_weights)

    def bidegree(self, z: str) -> tuple:
        i = self.chart.index(z)
        return (self.h_weights[i], self.k_weights[i])

    def _with(self, bd):
        return tuple(c for c in self.chart.coords if self.bidegree(c) == bd)

    @property
    def base(self) -> tuple:
        return self._with((0, 0))

    @property
    def a_side(self) -> tuple:
        """Fiber coordinates of the side bundle A = h_0(D)."""
        return self._with((0, 1))

    @property
    def e_side(self) -> tuple:
        """Fiber coordinates of the side bundle E = k_0(D)."""
        return self._with((1, 0))

    @property
    def core(self) -> tuple:
        return self._with((1, 1))

    def bidegrees(self) -> dict:
        return {c: self.bidegree(c) for c in self.chart.coords}


def dvb_from_pair(h: ChartedAction, k: ChartedAction) -> DVB:
    """Bidegree assignment for a commuting pair of regular diagonal actions."""
    h = h.detect_diagonal()
    k = k.detect_diagonal()
    if not (h.is_diagonal and k.is_diagonal):
        raise ActionError("bidegrees need diagonal actions")
    if not (check_regular(h) and check_regular(k)):
        raise ActionError("both actions must be regular")
    rep = check_commuting(h, k)
    if not rep:
        raise ActionError("actions do not commute: " + "; ".join(map(str, rep.violations)))
    return DVB(h.chart, h.weights, k.weights)


@dataclass(frozen=True)
class DualDVB:
    """Dual of a DVB along one of its fibrations.

    ``dvb.h`` is the action induced from ``h`` and ``dvb.k`` the one from
    ``k``; exactly one of them is the homothety of the dualised bundle.
    ``pairing`` is the fiber pairing on the fibred product of the original and
    the dual chart.
    """

    side: str
    dvb: DVB
    dual_of: dict  # dual coordinate -> original coordinate
    pairing: Scalar
    report: Report


def _free_duals(fib, coords) -> dict:
    """``{dual name: fiber coordinate}``, suffixing ``__d`` where ``dual`` would clash."""
    taken = set(coords)
    out = {}
    for c in fib:
        n = names.dual(c)
        while n in taken:
            n += "__d"
        taken.add(n)
        out[n] = c
    return out


def dual_action_data(D: DVB, side: str) -> DualDVB:
    """``side='vertical'`` dualises D -> A (fibers = h-weight 1), ``'horizontal'`` D -> E."""
    if side not in ("vertical", "horizontal"):
        raise ActionError("side must be 'vertical' or 'horizontal'")
    coords = D.chart.coords
    hw = dict(zip(coords, D.h_weights))
    kw = dict(zip(coords, D.k_weights))
    if side == "vertical":
        dualised, other, other_name = hw, kw, "k"
    else:
        dualised, other, other_name = kw, hw, "h"
    kept = [c for c in coords if dualised[c] == 0]
    fib = [c for c in coords if dualised[c] == 1]
    dual_names = _free_duals(fib, coords)
    chart = Chart(kept + list(dual_names))
    homothety = {c: 0 for c in kept} | {d: 1 for d in dual_names}
    induced = {c: other[c] for c in kept} | {d: 1 - other[z] for d, z in dual_names.items()}
    if side == "vertical":
        dual = DVB.from_weights(chart, homothety, induced)
    else:
        dual = DVB.from_weights(chart, induced, homothety)
    pairing = sum((Scalar.var(d) * Scalar.var(z) for d, z in dual_names.items()), ZERO)
    rep = Report(f"pairing ({side})")
    # <kbar_l xi, k_l v> = l <xi, v> on the fibred product over the kept chart
    act = {c: LAMBDA ** other[c] * Scalar.var(c) for c in kept + fib}
    act |= {d: LAMBDA ** induced[d] * Scalar.var(d) for d in dual_names}
    rep.expect_equal(f"<{other_name}bar_l xi, {other_name}_l v> = l <xi, v>",
                     pairing.substitute(act), LAMBDA * pairing)
    for c in kept:
        if induced[c] != other[c]:
            rep.fail(f"induced action differs from {other_name} on {c}", induced[c], other[c])
    return DualDVB(side, dual, dual_names, pairing, rep)


def check_tildeh(D: DVB, side: str = "vertical") -> Report:
    """``kbar_l = (k_{1/l})^* hbar_l`` on the dual, as a Laurent identity.

    For the horizontal dual the roles of ``h`` and ``k`` are exchanged.
    """
    dd = dual_action_data(D, side)
    rep = Report(f"tildeh ({side})")
    coords = D.chart.coords
    if side == "vertical":
        hom, other = D.h, D.k
        bar_other = dd.dvb.k
    else:
        hom, other = D.k, D.h
        bar_other = dd.dvb.h
    homw = dict(zip(coords, hom.weights))
    kept = [c for c in coords if homw[c] == 0]
    fib = [c for c in coords if homw[c] == 1]
    inv = {c: f.substitute({PARAM: LAMBDA ** -1}) for c, f in zip(coords, other.components)}
    fwd = dict(zip(coords, other.components))
    # fiber matrix of other_{1/l}: L[w][z] = d(inv[w])/dz, linear in the fibers
    L = {(w, z): inv[w].partial(z) for w in fib for z in fib}
    for (w, z), entry in L.items():
        if entry.variables() & set(fib):
            rep.fail(f"{other} is not fiberwise linear", entry, "")
            return rep
    base_image = {c: fwd[c] for c in kept}  # other_l on the base, inverse of other_{1/l}
    dual_names = dd.dual_of
    result = {c: base_image[c] for c in kept}
    for d, z in dual_names.items():
        acc = ZERO
        for dw, w in dual_names.items():
            acc = acc + L[(w, z)].substitute(base_image) * LAMBDA * Scalar.var(dw)
        result[d] = acc
    for c, expected in zip(dd.dvb.chart.coords, bar_other.components):
        rep.expect_equal(f"component {c}", expected, result[c])
    rep.absorb(dd.report)
    return rep


# ---------------------------------------------------------------------------
# cotangent constructions


def cotangent_chart(chart: Chart) -> Chart:
    return Chart(chart.coords + tuple(names.dual(c) for c in chart.coords))


def phase_lift(h: ChartedAction) -> ChartedAction:
    """``l * (dh_{1/l})^*`` on the cotangent chart (coordinates + momenta)."""
    coords = h.chart.coords
    comps = h.components
    inv = [c.substitute({PARAM: LAMBDA ** -1}) for c in comps]
    J = [[f.partial(z) for z in coords] for f in inv]  # J of h_{1/l}
    at = dict(zip(coords, comps))
    out = list(comps)
    for j, z in enumerate(coords):
        acc = ZERO
        for i, w in enumerate(coords):
            if J[i][j]:
                acc = acc + J[i][j].substitute(at) * Scalar.var(names.dual(w))
        out.append(LAMBDA * acc)
    for f in out:
        if not _param_free_of_negatives(f):
            raise ActionError(f"phase lift is not polynomial in {PARAM}: {f}")
    return ChartedAction.general(cotangent_chart(h.chart), out).detect_diagonal()


@dataclass(frozen=True)
class Reversal:
    base: tuple
    fibers: tuple
    source: DVB  # T*A with (cotangent homothety, phase lift)
    target: DVB  # T*A* likewise
    map: PolyMap


def reversal(base: Iterable[str], fibers: Iterable[str]) -> Reversal:
    """``R_A: T*A -> T*A*``, ``(x; phi, omega, v) -> (x; v, -omega, phi)``.

    T*A has coordinates ``(x, a, x_s, a_s)``; T*A* is ordered
    ``(x, a_s, x_s, a)`` so that the momentum dual to ``a_s`` is ``a``.
    """
    base = tuple(base)
    fibers = tuple(fibers)
    A = Chart(base + fibers)
    TA = cotangent_chart(A)
    Astar = Chart(base + tuple(names.dual(a) for a in fibers))
    TAs = cotangent_chart(Astar)
    hom = lambda ch, n: ChartedAction.diagonal(ch, {c: (1 if i >= n else 0) for i, c in enumerate(ch.coords)})
    src_h = hom(TA, A.dim)
    src_k = phase_lift(ChartedAction.diagonal(A, {a: 1 for a in fibers}))
    tgt_h = hom(TAs, Astar.dim)
    tgt_k = phase_lift(ChartedAction.diagonal(Astar, {names.dual(a): 1 for a in fibers}))
    comps = {x: Scalar.var(x) for x in base}
    for a in fibers:
        comps[names.dual(a)] = Scalar.var(names.dual(a))  # v
        comps[a] = Scalar.var(a)  # phi
    for x in base:
        comps[names.dual(x)] = -Scalar.var(names.dual(x))  # -omega
    R = PolyMap.from_dict(TA, TAs, comps)
    return Reversal(base, fibers, DVB(TA, src_h.weights, src_k.weights),
                    DVB(TAs, tgt_h.weights, tgt_k.weights), R)


def check_dvb_morphism(F: PolyMap, src: DVB, tgt: DVB, swap: bool = False) -> Report:
    """``F`` intertwines the actions (``h<->k`` on the target when ``swap``)."""
    rep = Report("dvb_morphism")
    pairs = [(src.h, tgt.k if swap else tgt.h, "h"), (src.k, tgt.h if swap else tgt.k, "k")]
    for a, b, label in pairs:
        lhs = F.apply(a.components)
        rhs = b.as_map().apply(F.components)
        for z, x, y in zip(F.target.coords, lhs, rhs):
            rep.expect_equal(f"intertwines {label}, component {z}", x, y)
    return rep


def check_reversal(rev: Reversal) -> Report:
    rep = Report("reversal")
    rep.absorb(check_dvb_morphism(rev.map, rev.source, rev.target, swap=True))
    # -id on cores: restrict to the core of T*A
    core = rev.source.core
    zero_else = {c: ZERO for c in rev.source.chart.coords if c not in core}
    tgt_core = rev.target.core
    image = dict(zip(rev.map.target.coords, rev.map.components))
    for c in rev.map.target.coords:
        val = image[c].substitute(zero_else)
        want = -Scalar.var(c) if c in tgt_core else ZERO
        rep.expect_equal(f"-id on core, component {c}", val, want)
    # sides are preserved: the A side goes to A (now the second side of T*A*)
    for tgt_side, src_side in ((rev.target.e_side, rev.source.a_side),
                               (rev.target.a_side, rev.source.e_side)):
        for c in tgt_side:
            comp = image[c]
            ok = comp.variables() <= set(src_side) and comp.degree() == 1
            rep.expect_equal(f"side preserved, component {c}", ok, True)
    return rep
