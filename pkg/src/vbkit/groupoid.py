"""Polynomial Lie groupoids in source-trivialised form and the Lie functor.

Conventions: an arrow ``g`` goes from ``s(g)`` to ``t(g)``; ``m(a, b) = a b``
is defined when ``s(a) = t(b)``.  The source is a coordinate projection, so
composable pairs are parametrised by all coordinates of ``b`` and the
non-source coordinates of ``a``.  The multiplication is stored on the
ambient chart ``G x G`` with second-factor names ``p__2``; it is only ever
evaluated on composable pairs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from . import names
from .actions import ChartedAction, check_regular, fixed_locus
from .algebroid import AlgebroidData, check_axioms
from .geometry import Chart, PolyMap, SolveError, VectorField, commutator, solve_affine, tangent_map
from .linalg import certify_rank
from .report import PASS, UNFALSIFIED, Report
from .scalar import ZERO, Scalar


class GroupoidError(ValueError):
    pass


def second(name: str) -> str:
    return names.copy(name, 2)


@dataclass(frozen=True)
class GroupoidData:
    objects: Chart
    arrows: Chart
    source: PolyMap
    target: PolyMap
    unit: PolyMap
    inverse: PolyMap
    mult: PolyMap  # on arrows x arrows (second factor renamed with __2)

    def __post_init__(self):
        G, M = self.arrows, self.objects
        for f, src, tgt, label in ((self.source, G, M, "source"), (self.target, G, M, "target"),
                                   (self.unit, M, G, "unit"), (self.inverse, G, G, "inverse"),
                                   (self.mult, self.pair_chart, G, "mult")):
            if f.source.coords != src.coords or f.target.coords != tgt.coords:
                raise GroupoidError(f"{label} map has the wrong charts")
        seen = set()
        for c in self.source.components:
            vs = c.variables()
            if len(vs) != 1 or c != Scalar.var(next(iter(vs))) or c in seen:
                raise GroupoidError("source must be a coordinate projection")
            seen.add(c)

    @property
    def pair_chart(self) -> Chart:
        return Chart(self.arrows.coords + tuple(second(c) for c in self.arrows.coords))

    @property
    def source_coords(self) -> tuple:
        """Arrow coordinates read off by the source, in object order."""
        return tuple(next(iter(c.variables())) for c in self.source.components)

    @property
    def nonsource_coords(self) -> tuple:
        src = set(self.source_coords)
        return tuple(c for c in self.arrows.coords if c not in src)

    # evaluation helpers -------------------------------------------------
    def s(self, g: Sequence[Scalar]) -> tuple:
        return self.source.apply(list(g))

    def t(self, g: Sequence[Scalar]) -> tuple:
        return self.target.apply(list(g))

    def u(self, x: Sequence[Scalar]) -> tuple:
        return self.unit.apply(list(x))

    def i(self, g: Sequence[Scalar]) -> tuple:
        return self.inverse.apply(list(g))

    def m(self, a: Sequence[Scalar], b: Sequence[Scalar]) -> tuple:
        return self.mult.apply(list(a) + list(b))

    def generic_chain(self, k: int) -> list:
        """A generic composable chain ``g_1, ..., g_k`` as coordinate tuples."""
        chain = []
        nxt = [Scalar.var(names.copy(c, k)) for c in self.arrows.coords]
        chain.append(nxt)
        for j in range(k - 1, 0, -1):
            tb = self.t(chain[0])
            g = [Scalar.var(names.copy(c, j)) for c in self.arrows.coords]
            for c, val in zip(self.source_coords, tb):
                g[self.arrows.index(c)] = val
            chain.insert(0, g)
        return chain

    def composable_pair(self) -> tuple:
        """``(a, b)`` in ambient names: ``a`` plain, ``b`` with ``__2``."""
        b = [Scalar.var(second(c)) for c in self.arrows.coords]
        a = [Scalar.var(c) for c in self.arrows.coords]
        for c, val in zip(self.source_coords, self.t(b)):
            a[self.arrows.index(c)] = val
        return a, b

    def generic_arrow(self) -> list:
        return [Scalar.var(c) for c in self.arrows.coords]

    def generic_object(self) -> list:
        return [Scalar.var(c) for c in self.objects.coords]


def _expect_tuple(rep: Report, where: str, lhs, rhs, labels) -> None:
    for n, a, b in zip(labels, lhs, rhs):
        rep.expect_equal(f"{where} [{n}]", a, b)


def check_groupoid_axioms(G: GroupoidData) -> Report:
    rep = Report("groupoid_axioms")
    x = G.generic_object()
    g = G.generic_arrow()
    M, A = G.objects.coords, G.arrows.coords
    _expect_tuple(rep, "s(u(x)) = x", G.s(G.u(x)), x, M)
    _expect_tuple(rep, "t(u(x)) = x", G.t(G.u(x)), x, M)
    _expect_tuple(rep, "s(i(g)) = t(g)", G.s(G.i(g)), G.t(g), M)
    _expect_tuple(rep, "t(i(g)) = s(g)", G.t(G.i(g)), G.s(g), M)
    a, b = G.composable_pair()
    ab = G.m(a, b)
    _expect_tuple(rep, "s(ab) = s(b)", G.s(ab), G.s(b), M)
    _expect_tuple(rep, "t(ab) = t(a)", G.t(ab), G.t(a), M)
    _expect_tuple(rep, "u(t(g)) g = g", G.m(G.u(G.t(g)), g), g, A)
    _expect_tuple(rep, "g u(s(g)) = g", G.m(g, G.u(G.s(g))), g, A)
    _expect_tuple(rep, "g i(g) = u(t(g))", G.m(g, G.i(g)), G.u(G.t(g)), A)
    _expect_tuple(rep, "i(g) g = u(s(g))", G.m(G.i(g), g), G.u(G.s(g)), A)
    f, gg, h = G.generic_chain(3)
    _expect_tuple(rep, "(fg)h = f(gh)", G.m(G.m(f, gg), h), G.m(f, G.m(gg, h)), A)
    return rep


# ---------------------------------------------------------------------------
# constructors


def pair_groupoid(objects: Sequence[str], target_names: Sequence[str] | None = None,
                  source_names: Sequence[str] | None = None) -> GroupoidData:
    """``M x M``; arrows ``(p, q)`` from ``q`` to ``p``."""
    xs = tuple(objects)
    n = len(xs)
    ps = tuple(target_names) if target_names else (("p",) if n == 1 else tuple(f"p{i + 1}" for i in range(n)))
    qs = tuple(source_names) if source_names else (("q",) if n == 1 else tuple(f"q{i + 1}" for i in range(n)))
    M = Chart(xs)
    G = Chart(ps + qs)
    src = PolyMap(G, M, qs)
    tgt = PolyMap(G, M, ps)
    unit = PolyMap(M, G, xs + xs)
    inv = PolyMap(G, G, qs + ps)
    mult = PolyMap(Chart(ps + qs + tuple(second(c) for c in ps + qs)), G,
                   ps + tuple(second(q) for q in qs))
    return GroupoidData(M, G, src, tgt, unit, inv, mult)


def unit_groupoid(objects: Sequence[str], arrow_names: Sequence[str] | None = None) -> GroupoidData:
    xs = tuple(objects)
    gs = tuple(arrow_names) if arrow_names else tuple(f"g_{x}" for x in xs)
    M, G = Chart(xs), Chart(gs)
    pair = Chart(gs + tuple(second(c) for c in gs))
    return GroupoidData(M, G, PolyMap(G, M, gs), PolyMap(G, M, gs), PolyMap(M, G, xs),
                        PolyMap(G, G, gs), PolyMap(pair, G, tuple(second(c) for c in gs)))


def from_maps(objects: Sequence[str], arrows: Sequence[str], source, target, unit, inverse, mult) -> GroupoidData:
    """Build from component dicts; ``mult`` uses plain names for the first
    factor and ``__2`` names for the second."""
    M, G = Chart(objects), Chart(arrows)
    pair = Chart(G.coords + tuple(second(c) for c in G.coords))
    return GroupoidData(M, G, PolyMap.from_dict(G, M, source), PolyMap.from_dict(G, M, target),
                        PolyMap.from_dict(M, G, unit), PolyMap.from_dict(G, G, inverse),
                        PolyMap.from_dict(pair, G, mult))


def tangent_groupoid(G: GroupoidData, tag: str = "t") -> GroupoidData:
    """``TG => TM`` with every structure map replaced by its differential."""
    TM = Chart(G.objects.coords + tuple(names.dot(c, tag) for c in G.objects.coords))
    TG = Chart(G.arrows.coords + tuple(names.dot(c, tag) for c in G.arrows.coords))
    dm = tangent_map(G.mult, tag)
    ren = {}
    for c in G.arrows.coords:
        ren[names.dot(second(c), tag)] = second(names.dot(c, tag))
    sub = {k: Scalar.var(v) for k, v in ren.items()}
    pair = Chart(TG.coords + tuple(second(c) for c in TG.coords))
    mult = PolyMap(pair, TG, [c.substitute(sub) for c in dm.components])
    ds, dt, du, di = (tangent_map(f, tag) for f in (G.source, G.target, G.unit, G.inverse))
    return GroupoidData(TM, TG, PolyMap(TG, TM, ds.components), PolyMap(TG, TM, dt.components),
                        PolyMap(TM, TG, du.components), PolyMap(TG, TG, di.components), mult)


# ---------------------------------------------------------------------------
# Lie functor


def right_invariant_field(G: GroupoidData, n: str) -> VectorField:
    """``e_n^r(g) = d/de m(u(t(g)) + e d_n, g)`` at ``e = 0``."""
    if n not in G.nonsource_coords:
        raise GroupoidError(f"{n} is not a non-source coordinate")
    g = G.generic_arrow()
    a = G.u(G.t(g))
    sub = dict(zip(G.arrows.coords, a))
    sub.update({second(c): v for c, v in zip(G.arrows.coords, g)})
    comps = [c.partial(n).substitute(sub) for c in G.mult.components]
    return VectorField(G.arrows, comps)


def lie_algebroid_of(G: GroupoidData, check: bool = True) -> AlgebroidData:
    frame = G.nonsource_coords
    clash = set(frame) & set(G.objects.coords)
    if clash:
        raise GroupoidError(f"non-source arrow coordinates clash with object names: {sorted(clash)}")
    x = G.generic_object()
    at_units = dict(zip(G.arrows.coords, G.u(x)))
    anchor = [[tc.partial(n).substitute(at_units) for n in frame] for tc in G.target.components]
    fields = [right_invariant_field(G, n) for n in frame]
    st = {}
    idx = {c: k for k, c in enumerate(G.arrows.coords)}
    for i in range(len(frame)):
        for j in range(i + 1, len(frame)):
            br = commutator(fields[i], fields[j])
            for k, n in enumerate(frame):
                v = br.components[idx[n]].substitute(at_units)
                if v:
                    st[(i, j, k)] = v
    A = AlgebroidData(G.objects, frame, anchor, st)
    if check:
        rep = check_axioms(A)
        rep.absorb(check_right_invariant_brackets(G, A), "right-invariant")
        if not rep.passed:
            raise GroupoidError("Lie algebroid fails its checks: " + str(rep.violations[0]))
    return A


def check_right_invariant_brackets(G: GroupoidData, A: AlgebroidData) -> Report:
    """``[e_i^r, e_j^r] = sum c_ij^k(t(g)) e_k^r`` on all of ``G``."""
    rep = Report("right_invariant_brackets")
    fields = {n: right_invariant_field(G, n) for n in A.frame}
    tsub = dict(zip(G.objects.coords, G.t(G.generic_arrow())))
    for i in range(A.rank):
        for j in range(i + 1, A.rank):
            lhs = commutator(fields[A.frame[i]], fields[A.frame[j]])
            rhs = VectorField.zero(G.arrows)
            for k in range(A.rank):
                c = A.c(i, j, k)
                if c:
                    rhs = rhs + fields[A.frame[k]].scale(c.substitute(tsub))
            for name, a, b in zip(G.arrows.coords, lhs.components, rhs.components):
                rep.expect_equal(f"[{A.frame[i]}^r, {A.frame[j]}^r] along {name}", a, b)
    return rep


@dataclass(frozen=True)
class GroupoidMorphism:
    arrows: PolyMap
    objects: PolyMap


def check_groupoid_morphism(F: GroupoidMorphism, G1: GroupoidData, G2: GroupoidData) -> Report:
    rep = Report("groupoid_morphism")
    g = G1.generic_arrow()
    x = G1.generic_object()
    Fa = F.arrows.apply
    Fo = F.objects.apply
    _expect_tuple(rep, "s F = f s", G2.s(Fa(g)), Fo(G1.s(g)), G2.objects.coords)
    _expect_tuple(rep, "t F = f t", G2.t(Fa(g)), Fo(G1.t(g)), G2.objects.coords)
    _expect_tuple(rep, "F u = u f", Fa(G1.u(x)), G2.u(Fo(x)), G2.arrows.coords)
    _expect_tuple(rep, "F i = i F", Fa(G1.i(g)), G2.i(Fa(g)), G2.arrows.coords)
    a, b = G1.composable_pair()
    _expect_tuple(rep, "F(ab) = F(a)F(b)", Fa(G1.m(a, b)), G2.m(Fa(a), Fa(b)), G2.arrows.coords)
    return rep


def lie_of_morphism(F: GroupoidMorphism, G1: GroupoidData, G2: GroupoidData,
                    A1: AlgebroidData | None = None, A2: AlgebroidData | None = None) -> PolyMap:
    """The induced algebroid map ``A_G1 -> A_G2`` on total charts."""
    A1 = A1 or lie_algebroid_of(G1, check=False)
    A2 = A2 or lie_algebroid_of(G2, check=False)
    x = G1.generic_object()
    at_units = dict(zip(G1.arrows.coords, G1.u(x)))
    comps = list(F.objects.components)
    for n2 in A2.frame:
        Fn = F.arrows[n2]
        comps.append(sum((Fn.partial(n1).substitute(at_units) * Scalar.var(n1) for n1 in A1.frame), ZERO))
    return PolyMap(A1.total_chart, A2.total_chart, comps)


# ---------------------------------------------------------------------------
# actions


def check_multiplicative_action(G: GroupoidData, h: ChartedAction, hM: ChartedAction) -> Report:
    """Each ``h_l`` is a groupoid map covering ``hM_l``."""
    if h.chart.coords != G.arrows.coords or hM.chart.coords != G.objects.coords:
        raise GroupoidError("actions must live on the arrow and object charts")
    F = GroupoidMorphism(h.as_map(), hM.as_map())
    rep = Report("multiplicative_action")
    return rep.absorb(check_groupoid_morphism(F, G, G), "h_l")


def induced_object_action(G: GroupoidData, h: ChartedAction) -> ChartedAction:
    """``hM_l = s h_l u``."""
    x = G.generic_object()
    comps = G.s(h.as_map().apply(G.u(x)))
    return ChartedAction.general(G.objects, comps).detect_diagonal()


@dataclass(frozen=True)
class VBGroupoidData:
    groupoid: GroupoidData
    action: ChartedAction  # on arrows
    object_action: ChartedAction

    @classmethod
    def from_weights(cls, G: GroupoidData, weights: Mapping[str, int],
                     object_weights: Mapping[str, int] | None = None) -> "VBGroupoidData":
        h = ChartedAction.diagonal(G.arrows, weights)
        hM = (ChartedAction.diagonal(G.objects, object_weights) if object_weights is not None
              else induced_object_action(G, h))
        return cls(G, h, hM)

    def weights(self) -> dict:
        return self.action.detect_diagonal().weight_map()

    def object_weights(self) -> dict:
        return self.object_action.detect_diagonal().weight_map()


def check_vb_groupoid(V: VBGroupoidData, rng: random.Random | None = None) -> Report:
    rep = Report("vb_groupoid")
    reg = check_regular(V.action, rng)
    rep.details["regularity"] = reg.kind
    if reg.kind == "NonRegular":
        rep.fail("action is not regular", str({k: str(v) for k, v in sorted(reg.witness.items())}), "Regular")
    elif reg.kind == "Unfalsified" and rep.verdict == PASS:
        rep.verdict = UNFALSIFIED
    rep.absorb(check_groupoid_axioms(V.groupoid), "axioms")
    rep.absorb(check_multiplicative_action(V.groupoid, V.action, V.object_action), "multiplicative")
    return rep


@dataclass(frozen=True)
class CoreData:
    base: tuple  # weight-0 object coordinates
    fibers: tuple  # weight-1 non-source arrow coordinates

    @property
    def rank(self) -> int:
        return len(self.fibers)


def core_of(V: VBGroupoidData) -> CoreData:
    w = V.weights()
    wo = V.object_weights()
    return CoreData(tuple(x for x in V.groupoid.objects.coords if wo[x] == 0),
                    tuple(n for n in V.groupoid.nonsource_coords if w[n] == 1))


def core_sequence_check(V: VBGroupoidData, rng: random.Random | None = None) -> Report:
    """``0 -> t*C -> Gamma -> s*E -> 0`` fiberwise over the base groupoid."""
    G = V.groupoid
    w = V.weights()
    wo = V.object_weights()
    rep = Report("core_sequence")
    fib = [c for c in G.arrows.coords if w[c] == 1]
    efib = [x for x in G.objects.coords if wo[x] == 1]
    core = core_of(V).fibers
    zero_fib = {c: ZERO for c in fib}
    g = [Scalar.var(c).substitute(zero_fib) for c in G.arrows.coords]  # point of the base groupoid
    # C_{t(g)} -> Gamma_g : c -> (0_{t(g)} + c) * 0_g
    unit_t = list(G.u(G.t(g)))
    eps = {c: Scalar.var(names.copy(c, "c")) for c in core}
    left = [v + eps[c] if c in eps else v for c, v in zip(G.arrows.coords, unit_t)]
    prod = G.m(left, g)
    inc = [[prod[G.arrows.index(c)].partial(names.copy(k, "c")) for k in core] for c in fib]
    proj = [[G.source[x].partial(c) for c in fib] for x in efib]
    rep.details["core_rank"] = len(core)
    rep.details["side_rank"] = len(efib)
    rep.details["fiber_rank"] = len(fib)
    for i, row in enumerate(proj):
        for j in range(len(core)):
            v = sum((row[t] * inc[t][j] for t in range(len(fib))), ZERO)
            rep.expect_equal(f"ds o inclusion, row {efib[i]} column {core[j]}", v, ZERO)
    rng = rng or random.Random(0)
    if core:
        ci = certify_rank(inc, rng)
        if ci.generic_rank != len(core) or not ci.constant:
            rep.fail("core inclusion is not injective", ci.generic_rank, len(core))
    if efib:
        cp = certify_rank(proj, rng)
        if cp.generic_rank != len(efib) or not cp.constant:
            rep.fail("ds on fibers is not onto", cp.generic_rank, len(efib))
    rep.expect_equal("rank count", len(core) + len(efib), len(fib))
    return rep


def fixed_subgroupoid(V: VBGroupoidData) -> GroupoidData:
    """The base groupoid ``h_0(Gamma) => h_0(E)`` for a diagonal action."""
    G = V.groupoid
    w = V.weights()
    wo = V.object_weights()
    keepA = tuple(c for c in G.arrows.coords if w[c] == 0)
    keepM = tuple(x for x in G.objects.coords if wo[x] == 0)
    return restrict_groupoid(G, keepA, keepM, {c: ZERO for c in G.arrows.coords if w[c] != 0},
                             {x: ZERO for x in G.objects.coords if wo[x] != 0})


def restrict_groupoid(G: GroupoidData, keepA: Sequence[str], keepM: Sequence[str],
                      solvedA: Mapping[str, Scalar], solvedM: Mapping[str, Scalar]) -> GroupoidData:
    """Subgroupoid cut out by solved forms on arrows and objects."""
    keepA, keepM = tuple(keepA), tuple(keepM)
    A, M = Chart(keepA), Chart(keepM)
    subA = dict(solvedA)
    subM = dict(solvedM)
    subA2 = {second(k): v.substitute({c: Scalar.var(second(c)) for c in G.arrows.coords})
             for k, v in subA.items()}
    src = [G.source[x].substitute(subA) for x in keepM]
    tgt = [G.target[x].substitute(subA) for x in keepM]
    unit = [G.unit[c].substitute(subM) for c in keepA]
    inv = [G.inverse[c].substitute(subA) for c in keepA]
    mul = [G.mult[c].substitute({**subA, **subA2}) for c in keepA]
    pair = Chart(keepA + tuple(second(c) for c in keepA))
    out = GroupoidData(M, A, PolyMap(A, M, src), PolyMap(A, M, tgt), PolyMap(M, A, unit),
                       PolyMap(A, A, inv), PolyMap(pair, A, mul))
    _check_closed(G, out, subA, subM)
    return out


def _check_closed(G: GroupoidData, sub: GroupoidData, subA: Mapping, subM: Mapping) -> None:
    """Every structure map of ``G`` must respect the solved forms."""
    def full(point, keep, solved, coords):
        vals = dict(zip(keep, point))
        return {c: (vals[c] if c in vals else solved[c].substitute(vals)) for c in coords}

    a = sub.generic_arrow()
    x = sub.generic_object()
    ka, km = sub.arrows.coords, sub.objects.coords
    ga = [full(a, ka, subA, G.arrows.coords)[c] for c in G.arrows.coords]
    gx = [full(x, km, subM, G.objects.coords)[c] for c in G.objects.coords]
    pa, pb = sub.composable_pair()
    gpa = [full(pa, ka, subA, G.arrows.coords)[c] for c in G.arrows.coords]
    gpb = [full(pb, ka, subA, G.arrows.coords)[c] for c in G.arrows.coords]
    checks = (("source", G.s(ga), sub.s(a), G.objects.coords, km, subM),
              ("target", G.t(ga), sub.t(a), G.objects.coords, km, subM),
              ("unit", G.u(gx), sub.u(x), G.arrows.coords, ka, subA),
              ("inverse", G.i(ga), sub.i(a), G.arrows.coords, ka, subA),
              ("mult", G.m(gpa, gpb), sub.m(pa, pb), G.arrows.coords, ka, subA))
    for label, big, small, coords, keep, solved in checks:
        want = full(small, keep, solved, coords)
        for c, v in zip(coords, big):
            if v != want[c]:
                raise GroupoidError(f"{label} leaves the subgroupoid along {c}")


def differentiate_action(V: VBGroupoidData, rng: random.Random | None = None) -> tuple:
    """``(A_Gamma, h', report)`` with the checks of the differentiation statement."""
    from .vb import VBAlgebroidData, base_algebroid, check_im_action

    G = V.groupoid
    A = lie_algebroid_of(G)
    w = V.weights()
    wo = V.object_weights()
    hw = {x: wo[x] for x in A.base.coords}
    hw.update({n: w[n] for n in A.frame})
    hp = ChartedAction.diagonal(A.total_chart, hw)
    rep = Report("differentiate_action")
    rep.absorb(check_im_action(A, hp), "(a) IM")
    base = lie_algebroid_of(fixed_subgroupoid(V))
    locus = fixed_locus(hp)
    rep.expect_equal("(b) fixed locus chart", sorted(locus.free), sorted(base.base.coords + base.frame))
    if rep.passed:
        fixed = base_algebroid(VBAlgebroidData(A, hp))
        rep.expect_equal("(b) fixed-locus algebroid", fixed.describe(), base.describe())
    r1 = check_regular(V.action, rng)
    r2 = check_regular(hp, rng)
    rep.details["regular_groupoid"] = r1.kind
    rep.details["regular_algebroid"] = r2.kind
    if r1.kind == "Regular":
        rep.expect_equal("(c) h' regular", r2.kind, "Regular")
    return A, hp, rep


# ---------------------------------------------------------------------------
# vertical bundles


VTAG = "v"


def vertical_bundle_groupoid(G: GroupoidData, h: ChartedAction, hM: ChartedAction | None = None) -> tuple:
    """``V_h Gamma => V_h E`` over the fixed-point subgroupoid, and ``V_h``.

    Returns ``(VBGroupoidData, GroupoidMorphism)``; the vertical lift is a
    groupoid map ``Gamma -> V_h Gamma``.
    """
    hM = hM or induced_object_action(G, h)
    if not check_multiplicative_action(G, h, hM).passed:
        raise GroupoidError("action is not multiplicative")
    h, hM = h.detect_diagonal(), hM.detect_diagonal()
    if not (h.is_diagonal and hM.is_diagonal):
        raise GroupoidError("vertical bundle groupoid needs diagonal actions")
    w, wo = h.weight_map(), hM.weight_map()
    T = tangent_groupoid(G, VTAG)
    keepA = tuple(c for c in G.arrows.coords if w[c] == 0) + tuple(
        names.dot(c, VTAG) for c in G.arrows.coords if w[c] != 0)
    keepM = tuple(x for x in G.objects.coords if wo[x] == 0) + tuple(
        names.dot(x, VTAG) for x in G.objects.coords if wo[x] != 0)
    solvedA = {c: ZERO for c in G.arrows.coords if w[c] != 0}
    solvedA.update({names.dot(c, VTAG): ZERO for c in G.arrows.coords if w[c] == 0})
    solvedM = {x: ZERO for x in G.objects.coords if wo[x] != 0}
    solvedM.update({names.dot(x, VTAG): ZERO for x in G.objects.coords if wo[x] == 0})
    VG = restrict_groupoid(T, keepA, keepM, solvedA, solvedM)
    weights = {c: int(c.endswith("_" + VTAG) and c not in G.arrows.coords) for c in VG.arrows.coords}
    oweights = {c: int(c.endswith("_" + VTAG) and c not in G.objects.coords) for c in VG.objects.coords}
    VV = VBGroupoidData.from_weights(VG, weights, oweights)
    lift_a = _vertical_lift_map(G.arrows, VG.arrows, w)
    lift_o = _vertical_lift_map(G.objects, VG.objects, wo)
    return VV, GroupoidMorphism(lift_a, lift_o)


def _vertical_lift_map(src: Chart, tgt: Chart, w: Mapping[str, int]) -> PolyMap:
    comps = []
    for c in tgt.coords:
        if c in src.coords:
            comps.append(Scalar.var(c))
        else:
            base = next(z for z in src.coords if names.dot(z, VTAG) == c)
            comps.append(Scalar.var(base) if w[base] == 1 else ZERO)
    return PolyMap(src, tgt, comps)


def _is_coordinate_bijection(f: PolyMap) -> bool:
    seen = set()
    for c in f.components:
        vs = c.variables()
        if len(vs) != 1 or c != Scalar.var(next(iter(vs))):
            return False
        seen |= vs
    return len(seen) == f.source.dim == f.target.dim


def vertical_lift_groupoid_check(G: GroupoidData, h: ChartedAction, hM: ChartedAction | None = None,
                                 rng: random.Random | None = None) -> Report:
    hM = hM or induced_object_action(G, h)
    VV, lift = vertical_bundle_groupoid(G, h, hM)
    rep = Report("vertical_lift_groupoid")
    rep.absorb(check_groupoid_axioms(VV.groupoid), "V_h axioms")
    rep.absorb(check_groupoid_morphism(lift, G, VV.groupoid), "V_h morphism")
    # equivariance: V_h h_l = kappa_l V_h
    for f, act, kap, label in ((lift.arrows, h, VV.action, "arrows"), (lift.objects, hM, VV.object_action, "objects")):
        lhs = f.apply(act.components)
        rhs = kap.as_map().apply(f.components)
        _expect_tuple(rep, f"equivariance on {label}", lhs, rhs, f.target.coords)
    reg = check_regular(h, rng)
    iso = _is_coordinate_bijection(lift.arrows) and _is_coordinate_bijection(lift.objects)
    rep.details["regular"] = reg.kind
    rep.details["lift_iso"] = iso
    if reg.kind == "Regular" and not iso:
        rep.fail("vertical lift of a regular action is not an isomorphism", "not iso", "iso")
    if reg.kind == "NonRegular" and iso:
        rep.fail("vertical lift of a non-regular action is an isomorphism", "iso", "not iso")
    if reg.kind == "Regular":
        rep.absorb(diff_vl_triangle(G, h, hM, VV, lift), "triangle")
    return rep


def diff_vl_triangle(G: GroupoidData, h: ChartedAction, hM: ChartedAction, VV: VBGroupoidData,
                     lift: GroupoidMorphism) -> Report:
    """``j o V_{h'} = (V_h)'``.

    The Lie functor keeps arrow names, so ``j`` is the identity on names: the
    dot of a weight-1 coordinate ``c`` is ``c_v`` on both sides.
    """
    from .actions import vertical_lift

    V = VBGroupoidData(G, h.detect_diagonal(), hM.detect_diagonal())
    A, hp, _ = differentiate_action(V)
    AV = lie_algebroid_of(VV.groupoid)
    tag = names.free_tag(A.total_chart.coords)
    lhs_map = vertical_lift(hp, tag)
    # keep the components that land in V_{h'}: weight-0 coordinates and dots of weight-1 ones
    w = hp.weight_map()
    comps = {}
    for c, f in zip(lhs_map.target.coords, lhs_map.components):
        comps[c] = f
    target = {}
    for c in A.total_chart.coords:
        if w[c] == 0:
            target[c] = comps[c]
        else:
            target[names.dot(c, VTAG)] = comps[names.dot(c, tag)]
    rhs = lie_of_morphism(lift, G, VV.groupoid, A, AV)
    rep = Report("diff_vl")
    rep.expect_equal("target charts", " ".join(sorted(target)), " ".join(sorted(rhs.target.coords)))
    if rep.passed:
        for c in rhs.target.coords:
            rep.expect_equal(f"component {c}", target[c], rhs[c])
    return rep


# ---------------------------------------------------------------------------
# fibred products


def _rename_second(G1: GroupoidData, G2: GroupoidData) -> dict:
    taken = set(G1.arrows.coords) | set(G1.objects.coords)
    ren = {}
    for c in G2.arrows.coords + G2.objects.coords:
        if c in taken:
            new = names.copy(c, 2)
            while new in taken:
                new += "_"
            ren[c] = new
    return ren


def _renamed(G: GroupoidData, ren: Mapping[str, str]) -> GroupoidData:
    subA = {c: Scalar.var(ren.get(c, c)) for c in G.arrows.coords}
    subM = {c: Scalar.var(ren.get(c, c)) for c in G.objects.coords}
    A = G.arrows.rename(ren)
    M = G.objects.rename(ren)
    pair_sub = dict(subA)
    pair_sub.update({second(c): Scalar.var(second(ren.get(c, c))) for c in G.arrows.coords})
    pair = Chart(A.coords + tuple(second(c) for c in A.coords))
    return GroupoidData(M, A, PolyMap(A, M, [c.substitute(subA) for c in G.source.components]),
                        PolyMap(A, M, [c.substitute(subA) for c in G.target.components]),
                        PolyMap(M, A, [c.substitute(subM) for c in G.unit.components]),
                        PolyMap(A, A, [c.substitute(subA) for c in G.inverse.components]),
                        PolyMap(pair, A, [c.substitute(pair_sub) for c in G.mult.components]))


def fibred_product_groupoid(F1: GroupoidMorphism, G1: GroupoidData, F2: GroupoidMorphism,
                            G2: GroupoidData, G: GroupoidData) -> tuple:
    """``(G12, rename)``: the solved-form subgroupoid of ``G1 x G2``."""
    ren = _rename_second(G1, G2)
    G2r = _renamed(G2, ren)
    subA = {c: Scalar.var(ren.get(c, c)) for c in G2.arrows.coords}
    subM = {c: Scalar.var(ren.get(c, c)) for c in G2.objects.coords}
    eqA = [a - b.substitute(subA) for a, b in zip(F1.arrows.components, F2.arrows.components)]
    eqM = [a - b.substitute(subM) for a, b in zip(F1.objects.components, F2.objects.components)]
    try:
        solA = solve_affine(eqA, list(reversed(G2r.arrows.coords)) + list(reversed(G1.arrows.coords)))
        solM = solve_affine(eqM, list(reversed(G2r.objects.coords)) + list(reversed(G1.objects.coords)))
    except SolveError as exc:
        raise GroupoidError(f"pair is not good in solved form: {exc}") from None
    P = product_groupoid(G1, G2r)
    keepA = [c for c in P.arrows.coords if c not in solA]
    keepM = [c for c in P.objects.coords if c not in solM]
    FP = restrict_groupoid(P, keepA, keepM, solA, solM)
    rep = check_groupoid_axioms(FP)
    if not rep.passed:
        raise GroupoidError("fibred product fails the groupoid axioms: " + str(rep.violations[0]))
    return FP, ren


def product_groupoid(G1: GroupoidData, G2: GroupoidData) -> GroupoidData:
    M = G1.objects + G2.objects
    A = G1.arrows + G2.arrows
    pair = Chart(A.coords + tuple(second(c) for c in A.coords))
    mult = list(G1.mult.components) + list(G2.mult.components)
    # G1.mult is on (a1, a1__2); G2.mult on (a2, a2__2): both sets of names live in pair
    return GroupoidData(M, A, PolyMap(A, M, G1.source.components + G2.source.components),
                        PolyMap(A, M, G1.target.components + G2.target.components),
                        PolyMap(M, A, G1.unit.components + G2.unit.components),
                        PolyMap(A, A, G1.inverse.components + G2.inverse.components),
                        PolyMap(pair, A, mult))


def lie_functor_fp_check(F1: GroupoidMorphism, G1: GroupoidData, F2: GroupoidMorphism,
                         G2: GroupoidData, G: GroupoidData) -> Report:
    """``Lie(G1 x_G G2) = Lie(G1) x_Lie(G) Lie(G2)`` coordinate-exactly."""
    from .vb import fibred_product_algebroid

    FP, ren = fibred_product_groupoid(F1, G1, F2, G2, G)
    lhs = lie_algebroid_of(FP)
    A1, A2, A = (lie_algebroid_of(x) for x in (G1, G2, G))
    f1 = lie_of_morphism(F1, G1, G, A1, A)
    f2 = lie_of_morphism(F2, G2, G, A2, A)
    rhs = fibred_product_algebroid(f1, A1, f2, A2, A, rename={k: v for k, v in ren.items()
                                                              if k in A2.total_chart.coords})
    rep = Report("lie_functor_fibred_product")
    rep.expect_equal("base chart", " ".join(lhs.base.coords), " ".join(rhs.base.coords))
    rep.expect_equal("frame", " ".join(lhs.frame), " ".join(rhs.frame))
    if rep.passed:
        rep.expect_equal("algebroid", lhs.describe(), rhs.describe())
    return rep
