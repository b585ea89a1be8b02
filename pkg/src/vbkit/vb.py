"""VB-algebroids as algebroids carrying a regular action by algebroid maps.

Throughout, ``Omega => E`` is the algebroid and ``h`` the action whose
fixed locus is the side ``A``.  Bidegrees ``(h-weight, homothety weight)``:
base ``(0,0)``, A side ``(0,1)``, E side ``(1,0)``, core ``(1,1)``.

The dual of ``Omega => E`` lives on the vertical dual ``Omega*_A`` and is an
algebroid over ``C*``.  It is obtained from the linear Poisson structure on
``Omega*_E`` by reading it along the ``C*`` fibration and then negating the
core frame (the new core is ``E*``).  With this sign the double dual returns
the original data exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping

from . import names
from .actions import ChartedAction, DVB, check_commuting, check_regular, fixed_locus
from .algebroid import (AlgebroidData, AlgebroidError, check_axioms, check_morphism, change_frame_signs,
                        product_algebroid, reorder, restrict_algebroid, split_bundle_map)
from .geometry import Chart, PolyMap, SolveError, solve_affine
from .linalg import certify_rank
from .poisson import PoissonData, algebroid_to_poisson, free_dual_names, check_linear, check_poisson_map, poisson_to_algebroid
from .report import PASS, UNFALSIFIED, Report
from .scalar import LAMBDA, PARAM, ZERO, Scalar


class VBError(ValueError):
    pass


@dataclass(frozen=True)
class VBAlgebroidData:
    total: AlgebroidData
    action: ChartedAction

    def __post_init__(self):
        if self.action.chart.coords != self.total.total_chart.coords:
            raise VBError("action must live on the total chart (base coordinates, then frame)")

    @classmethod
    def from_weights(cls, total: AlgebroidData, weights: Mapping[str, int]) -> "VBAlgebroidData":
        return cls(total, ChartedAction.diagonal(total.total_chart, weights))

    def validate(self) -> Report:
        """Regularity, commuting with the homothety, and the IM property."""
        rep = Report("vb_algebroid")
        reg = check_regular(self.action)
        rep.details["regularity"] = reg.kind
        if reg.kind == "NonRegular":
            rep.fail("action is not regular", str(reg.witness), "Regular")
        elif reg.kind != "Regular":
            rep.verdict = UNFALSIFIED if rep.verdict == PASS else rep.verdict
        rep.absorb(check_commuting(self.action, self.homothety()), "commutes with homothety")
        rep.absorb(check_im_action(self.total, self.action), "IM")
        return rep

    def homothety(self) -> ChartedAction:
        frame = set(self.total.frame)
        return ChartedAction.diagonal(self.total.total_chart,
                                      {c: int(c in frame) for c in self.total.total_chart.coords})

    def weights(self) -> dict:
        return self.action.detect_diagonal().weight_map()

    def dvb(self) -> DVB:
        h = self.action.detect_diagonal()
        if not h.is_diagonal:
            raise VBError("bidegrees need a diagonal action")
        return DVB(h.chart, h.weights, self.homothety().weights)

    @property
    def core_frame(self) -> tuple:
        w = self.weights()
        return tuple(e for e in self.total.frame if w[e] == 1)

    @property
    def side_frame(self) -> tuple:
        w = self.weights()
        return tuple(e for e in self.total.frame if w[e] == 0)

    @property
    def side_coords(self) -> tuple:
        w = self.weights()
        return tuple(x for x in self.total.base.coords if w[x] == 1)

    @property
    def base_coords(self) -> tuple:
        w = self.weights()
        return tuple(x for x in self.total.base.coords if w[x] == 0)


# ---------------------------------------------------------------------------
# the IM property


def check_im_action(A: AlgebroidData, h: ChartedAction) -> Report:
    """Each ``h_l`` is an algebroid map, checked as Laurent identities in ``l``."""
    if h.chart.coords != A.total_chart.coords:
        raise VBError("action must live on the algebroid total chart")
    phi = h.as_map()
    try:
        split_bundle_map(phi, A, A)
    except AlgebroidError as exc:
        raise VBError(f"action is not fiberwise linear: {exc}") from None
    nb = A.base.dim
    inv = PolyMap(A.base, A.base,
                  [c.substitute({PARAM: LAMBDA ** -1}) for c in phi.components[:nb]])
    rep = Report("im_action")
    sub = check_morphism(phi, A, A, base_inverse=inv)
    rep.absorb(sub, "h_l")
    rep.details["components"] = sorted({_violation_component(v.where) for v in sub.violations})
    return rep


def _violation_component(where: str) -> str:
    # "anchor naturality for e along x" / "bracket [a, b] along c"
    if where.startswith("anchor naturality for "):
        e, _, x = where[len("anchor naturality for "):].partition(" along ")
        return f"anchor({e};{x})"
    if where.startswith("bracket ["):
        pair, _, c = where[len("bracket ["):].partition("] along ")
        a, b = pair.split(", ")
        return f"bracket({a},{b};{c})"
    return where


def dual_poisson_weights(V: VBAlgebroidData) -> tuple:
    """Linear Poisson on ``Omega*_E``, its ``C*``-fibration weights, and the
    name of the dual coordinate of each frame element."""
    w = V.weights()
    dn = free_dual_names(V.total)
    pi = algebroid_to_poisson(V.total, dn)
    wd = {}
    for x in V.total.base.coords:
        wd[x] = w[x]
    for e in V.total.frame:
        if w[e] not in (0, 1):
            raise VBError(f"frame weight of {e} must be 0 or 1")
        wd[dn[e]] = 1 - w[e]
    return pi, wd, dn


def check_dual_double_linear(V: VBAlgebroidData) -> Report:
    """The other side of the VB-algebroid criterion: linearity along ``C*``.

    Failing entries are translated back into algebroid components so the
    verdict can be compared with :func:`check_im_action` component by
    component.
    """
    pi, wd, dn = dual_poisson_weights(V)
    fibers = tuple(c for c in pi.chart.coords if wd[c] == 1)
    sub = check_linear(pi, fibers)
    rep = Report("dual_double_linear")
    rep.absorb(sub, "C* fibration")
    back = {dn[e]: e for e in V.total.frame}
    comps = set()
    for a, b in sub.details.get("failing", []):
        if a in back and b in back:
            x, y = sorted((back[a], back[b]), key=V.total.idx)
            v = pi.matrix[pi.chart.index(a)][pi.chart.index(b)]
            need = wd[a] + wd[b] - 1
            lp = v.linear_part(list(back))
            for t, cf in sorted(lp[0].items()):
                if cf.weights(wd) != {need - wd[t]}:
                    comps.add(f"bracket({x},{y};{back[t]})")
            if lp[1]:
                comps.add(f"bracket({x},{y};*)")
        elif a in back or b in back:
            e, x = (a, b) if a in back else (b, a)
            comps.add(f"anchor({back[e]};{x})")
        else:
            comps.add(f"base({a},{b})")
    rep.details["components"] = sorted(comps)
    return rep


def base_algebroid(V: VBAlgebroidData) -> AlgebroidData:
    """Restriction to the fixed locus of ``h``: the side algebroid ``A => M``."""
    locus = fixed_locus(V.action).as_dict()
    frame = set(V.total.frame)
    base_solved = {k: v for k, v in locus.items() if k not in frame}
    fiber_solved = {k: v for k, v in locus.items() if k in frame}
    B = restrict_algebroid(V.total, base_solved, fiber_solved)
    rep = check_axioms(B)
    if not rep.passed:
        raise VBError("base structure fails the algebroid axioms: " + str(rep.violations[0]))
    return B


# ---------------------------------------------------------------------------
# duality


def dual_vb_algebroid(V: VBAlgebroidData, check: bool = True) -> VBAlgebroidData:
    """``Omega*_A => C*`` over ``A => M``.

    Chart: base ``(M, dual(core))``, frame ``(A side, dual(E side))``.
    """
    pi, wd, dn = dual_poisson_weights(V)
    fibers = tuple(c for c in pi.chart.coords if wd[c] == 1)
    rep = check_linear(pi, fibers)
    if not rep.passed:
        raise VBError("dual Poisson structure is not double linear: " + str(rep.violations[0]))
    frame_names = {dn[e]: e for e in V.side_frame}
    taken = set(pi.chart.coords) | set(V.side_frame)
    new_core = []
    for x in V.side_coords:
        n = names.dual(x)
        while n in taken:
            n += "__d"
        taken.add(n)
        frame_names[x] = n
        new_core.append(n)
    new_core = tuple(new_core)
    D = poisson_to_algebroid(pi, fibers, frame_names)
    base = V.base_coords + tuple(dn[e] for e in V.core_frame)
    frame = V.side_frame + new_core
    D = reorder(D, base, frame)
    D = change_frame_signs(D, {e: -1 for e in new_core})
    weights = {c: 0 for c in V.base_coords + V.side_frame}
    weights.update({c: 1 for c in base + frame if c not in weights})
    out = VBAlgebroidData.from_weights(D, weights)
    if check:
        im = check_im_action(D, out.action)
        if not im.passed:
            raise VBError("dual fails the IM check: " + str(im.violations[0]))
    return out


# ---------------------------------------------------------------------------
# good pairs, fibred products, kernels


@dataclass
class GoodPairVerdict:
    good: bool
    verdict: str  # "constant" | "falsified" | "unfalsified"
    generic_rank: int
    witness: dict | None = None
    base_solved: dict = field(default_factory=dict)
    rename: dict = field(default_factory=dict)

    def __bool__(self):
        return self.good

    def to_json(self) -> dict:
        return {"good": self.good, "verdict": self.verdict, "generic_rank": self.generic_rank,
                "witness": None if self.witness is None else {k: str(v) for k, v in sorted(self.witness.items())}}


def _second_factor_names(A1: AlgebroidData, A2: AlgebroidData) -> dict:
    taken = set(A1.total_chart.coords)
    ren = {}
    for c in A2.total_chart.coords:
        if c in taken:
            new = names.copy(c, 2)
            while new in taken or new in A2.total_chart.coords:
                new += "_"
            ren[c] = new
    return ren


def _vb(x) -> AlgebroidData:
    return x.total if isinstance(x, VBAlgebroidData) else x


def check_good_pair_vb(F1: PolyMap, A1, F2: PolyMap, A2, A, rng: random.Random | None = None,
                       samples: int = 1000, rename: Mapping[str, str] | None = None) -> GoodPairVerdict:
    """Rank criterion for two vector-bundle maps into the same bundle.

    Second-factor names that clash with the first factor get a ``__2``
    suffix unless ``rename`` is given.
    """
    A1, A2, A = _vb(A1), _vb(A2), _vb(A)
    b1 = split_bundle_map(F1, A1, A)
    b2 = split_bundle_map(F2, A2, A)
    ren = dict(rename) if rename is not None else _second_factor_names(A1, A2)
    sub2 = {k: Scalar.var(v) for k, v in ren.items()}
    x2 = [ren.get(x, x) for x in A2.base.coords]
    eqs = [c1 - c2.substitute(sub2) for c1, c2 in zip(b1.base_map.components, b2.base_map.components)]
    try:
        solved = solve_affine(eqs, list(reversed(x2)) + list(reversed(A1.base.coords)))
    except SolveError as exc:
        raise VBError(f"base maps are not a good pair in solved form: {exc}") from None
    M = []
    for k in range(A.rank):
        row = [b1.matrix[k][i].substitute(solved) for i in range(A1.rank)]
        row += [-(b2.matrix[k][i].substitute(sub2).substitute(solved)) for i in range(A2.rank)]
        M.append(row)
    if not M or not M[0]:
        return GoodPairVerdict(True, "constant", 0, None, solved, ren)
    cert = certify_rank(M, rng or random.Random(0), samples)
    return GoodPairVerdict(cert.constant, cert.verdict, cert.generic_rank, cert.witness, solved, ren)


def fibred_product_algebroid(F1: PolyMap, A1, F2: PolyMap, A2, A,
                             rename: Mapping[str, str] | None = None) -> AlgebroidData:
    """Fibred product of two algebroid maps as a solved-form subalgebroid of the product."""
    A1, A2, A = _vb(A1), _vb(A2), _vb(A)
    verdict = check_good_pair_vb(F1, A1, F2, A2, A, rename=rename)
    if verdict.verdict != "constant":
        raise VBError(f"no exact constant-rank certificate ({verdict.verdict})")
    ren = verdict.rename
    A2r = A2.rename(ren)
    P = product_algebroid(A1, A2r)
    b1 = split_bundle_map(F1, A1, A)
    b2 = split_bundle_map(F2, A2, A)
    sub2 = {k: Scalar.var(v) for k, v in ren.items()}
    eqs = []
    for k in range(A.rank):
        lhs = sum((b1.matrix[k][i] * Scalar.var(A1.frame[i]) for i in range(A1.rank)), ZERO)
        rhs = sum((b2.matrix[k][i].substitute(sub2) * Scalar.var(A2r.frame[i]) for i in range(A2.rank)), ZERO)
        eqs.append((lhs - rhs).substitute(verdict.base_solved))
    try:
        fiber_solved = solve_affine(eqs, list(reversed(A2r.frame)) + list(reversed(A1.frame)))
    except SolveError as exc:
        raise VBError(f"fiber relations are not in solved form: {exc}") from None
    FP = restrict_algebroid(P, verdict.base_solved, fiber_solved)
    rep = check_axioms(FP)
    if not rep.passed:
        raise VBError("fibred product fails the algebroid axioms: " + str(rep.violations[0]))
    return FP


def fibred_product_vb(F1: PolyMap, V1: VBAlgebroidData, F2: PolyMap, V2: VBAlgebroidData,
                      V: VBAlgebroidData | AlgebroidData) -> VBAlgebroidData:
    """Fibred product of VB-algebroid maps with the restricted product action."""
    ren = _second_factor_names(V1.total, V2.total)
    FP = fibred_product_algebroid(F1, V1, F2, V2, V, rename=ren)
    w = dict(V1.weights())
    for c, v in V2.weights().items():
        w[ren.get(c, c)] = v
    out = VBAlgebroidData.from_weights(FP, {c: w[c] for c in FP.total_chart.coords})
    rep = check_im_action(FP, out.action)
    if not rep.passed:
        raise VBError("fibred product fails the IM check: " + str(rep.violations[0]))
    return out


def exact_sequence_report(F1: PolyMap, A1, F2: PolyMap, A2, A, rng: random.Random | None = None) -> Report:
    """Exactness of ``0 -> T M12 -> T M1 x T M2 -> T M`` and of the fiber sequence."""
    A1, A2, A = _vb(A1), _vb(A2), _vb(A)
    verdict = check_good_pair_vb(F1, A1, F2, A2, A, rng)
    ren = verdict.rename
    sub2 = {k: Scalar.var(v) for k, v in ren.items()}
    solved = verdict.base_solved
    rep = Report("exact_sequence")
    b1 = split_bundle_map(F1, A1, A)
    b2 = split_bundle_map(F2, A2, A)
    coords = list(A1.base.coords) + [ren.get(x, x) for x in A2.base.coords]
    free = [c for c in coords if c not in solved]
    # base level
    J1 = b1.base_map.jacobian()
    J2 = [[c.substitute(sub2).partial(ren.get(x, x)) for x in A2.base.coords] for c in b2.base_map.components]
    D = [[v.substitute(solved) for v in r1] + [-v.substitute(solved) for v in r2] for r1, r2 in zip(J1, J2)]
    emb = [[(Scalar.var(c) if c not in solved else solved[c]).partial(f) for f in free] for c in coords]
    _exact(rep, "base", D, emb, len(coords), len(free), rng)
    # fiber level
    M = []
    for k in range(A.rank):
        row = [b1.matrix[k][i].substitute(solved) for i in range(A1.rank)]
        row += [-(b2.matrix[k][i].substitute(sub2).substitute(solved)) for i in range(A2.rank)]
        M.append(row)
    n = A1.rank + A2.rank
    cert = certify_rank(M, rng or random.Random(0)) if M and n else None
    r = cert.generic_rank if cert else 0
    rep.details["fiber_rank"] = r
    rep.details["fiber_kernel_rank"] = n - r
    if cert and not cert.constant:
        if cert.verdict == "falsified":
            rep.fail("fiber map rank is not constant", _point(cert.witness), f"rank {r}")
        else:
            rep.verdict = UNFALSIFIED if rep.verdict == PASS else rep.verdict
    return rep


def _point(w) -> str:
    return ", ".join(f"{k}={v}" for k, v in sorted(w.items())) if w else "?"


def _exact(rep: Report, label: str, D, emb, n: int, k: int, rng) -> None:
    # D o emb == 0 and dim ker D == k with emb injective
    for i, row in enumerate(D):
        for j in range(k):
            v = sum((row[t] * emb[t][j] for t in range(n)), ZERO)
            rep.expect_equal(f"{label}: composite row {i} column {j}", v, ZERO)
    ce = certify_rank(emb, rng or random.Random(0)) if emb and k else None
    if ce and (ce.generic_rank != k or not ce.constant):
        rep.fail(f"{label}: tangent map of the fibred product is not injective", ce.generic_rank, k)
    if D and D[0]:
        cd = certify_rank(D, rng or random.Random(0))
        rep.details[f"{label}_rank"] = cd.generic_rank
        if n - cd.generic_rank != k:
            rep.fail(f"{label}: kernel dimension", n - cd.generic_rank, k)
        elif not cd.constant:
            if cd.verdict == "falsified":
                rep.fail(f"{label}: rank drops", _point(cd.witness), cd.generic_rank)
            elif rep.verdict == PASS:
                rep.verdict = UNFALSIFIED


def zero_section_vb(V: VBAlgebroidData) -> tuple:
    """The rank-0 VB-algebroid over the base of ``V`` and its zero map into ``V``."""
    A = V.total
    Z = AlgebroidData.zero(A.base, ())
    w = V.weights()
    ZV = VBAlgebroidData.from_weights(Z, {x: w[x] for x in A.base.coords})
    comps = [Scalar.var(x) for x in A.base.coords] + [ZERO] * A.rank
    return ZV, PolyMap(Z.total_chart, A.total_chart, comps)


def kernel_vb(phi: PolyMap, V1: VBAlgebroidData, V2: VBAlgebroidData) -> VBAlgebroidData:
    """Kernel of a VB-algebroid map, as its fibred product with the zero section."""
    ZV, zero = zero_section_vb(V2)
    return fibred_product_vb(phi, V1, zero, ZV, V2)


# ---------------------------------------------------------------------------
# double structures


def check_double_lie_algebroid(D: DVB, horizontal: AlgebroidData, vertical: AlgebroidData) -> Report:
    """``horizontal``: Omega => E (IM action h); ``vertical``: Omega => A (IM action k)."""
    from .bialg import BialgebroidData, check_bialgebroid

    rep = Report("double_lie_algebroid")
    hz = reorder(horizontal, [c for c in D.chart.coords if c in horizontal.base.coords],
                 [c for c in D.chart.coords if c in horizontal.frame])
    vt = reorder(vertical, [c for c in D.chart.coords if c in vertical.base.coords],
                 [c for c in D.chart.coords if c in vertical.frame])
    if set(hz.base.coords) != set(D.base + D.e_side) or set(vt.base.coords) != set(D.base + D.a_side):
        raise VBError("horizontal must live over E and vertical over A")
    hw = dict(zip(D.chart.coords, D.h_weights))
    kw = dict(zip(D.chart.coords, D.k_weights))
    h = ChartedAction.diagonal(hz.total_chart, hw)
    k = ChartedAction.diagonal(vt.total_chart, kw)
    rep.absorb(check_axioms(hz), "(0) horizontal axioms")
    rep.absorb(check_axioms(vt), "(0) vertical axioms")
    rep.absorb(check_im_action(hz, h), "(i) horizontal IM")
    rep.absorb(check_im_action(vt, k), "(i) vertical IM")
    if not rep.passed:
        return rep
    dual = dual_vb_algebroid(VBAlgebroidData(hz, h)).total
    pi = algebroid_to_poisson(vt)
    order = dual.total_chart.coords
    pi = _reorder_poisson(pi, order)
    B = BialgebroidData.from_poisson(dual, pi)
    rep.absorb(check_bialgebroid(B), "(ii) bialgebroid")
    return rep


def _reorder_poisson(pi: PoissonData, order) -> PoissonData:
    if sorted(order) != sorted(pi.chart.coords):
        raise VBError(f"charts do not match: {order} vs {pi.chart.coords}")
    idx = [pi.chart.index(c) for c in order]
    return PoissonData(Chart(order), [[pi.matrix[i][j] for j in idx] for i in idx], check=False)


def check_pvb_algebroid(V: VBAlgebroidData, pi: PoissonData) -> Report:
    """(a) ``h_l`` is a Poisson map to ``l * pi``; (b) ``(Omega, pi)`` is a bialgebroid."""
    from .bialg import BialgebroidData, check_bialgebroid

    rep = Report("pvb_algebroid")
    pi = _reorder_poisson(pi, V.total.total_chart.coords)
    rep.absorb(check_poisson_map(V.action.as_map(), pi, pi, LAMBDA), "(a) h_l Poisson")
    try:
        B = BialgebroidData.from_poisson(V.total, pi)
    except Exception as exc:  # noqa: BLE001 - non-linear pi has no dual algebroid
        rep.fail("(b) Poisson structure is not linear over the algebroid base", str(exc), "linear")
        return rep
    rep.absorb(check_bialgebroid(B), "(b) bialgebroid")
    return rep
