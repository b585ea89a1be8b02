"""Name resolution and construction of library objects from a Document."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .. import names
from ..actions import DVB, ChartedAction
from ..algebroid import (AlgebroidData, cotangent_algebroid, cotangent_of_algebroid, product_algebroid,
                         tangent_algebroid, tangent_bundle_algebroid)
from ..geometry import Chart, PolyMap
from ..groupoid import (GroupoidData, GroupoidMorphism, VBGroupoidData, differentiate_action,
                        fibred_product_groupoid, fixed_subgroupoid, lie_algebroid_of, lie_of_morphism,
                        pair_groupoid, tangent_groupoid, vertical_bundle_groupoid)
from ..poisson import InternalConsistencyError, PoissonData, algebroid_to_poisson, tangent_lift_poisson
from ..scalar import PARAM
from ..vb import (VBAlgebroidData, base_algebroid, dual_vb_algebroid, fibred_product_algebroid,
                  fibred_product_vb, kernel_vb)
from .ast import (ActionDecl, AlgebroidDecl, CheckDecl, ChartDecl, Document, DVBDecl, GMorphismDecl,
                  GroupoidDecl, LetDecl, MapDecl, PoissonDecl, Ref, VBAlgebroidDecl, VBGroupoidDecl)
from .lexer import DSLError, Loc


@dataclass(frozen=True)
class BundleMap:
    """A polynomial map together with the objects it goes between."""

    map: PolyMap
    source: object
    target: object


@dataclass(frozen=True)
class GMorphism:
    morphism: GroupoidMorphism
    source: GroupoidData
    target: GroupoidData


KINDS = ((Chart, "chart"), (ChartedAction, "action"), (DVB, "dvb"), (PoissonData, "poisson"),
         (AlgebroidData, "algebroid"), (VBAlgebroidData, "vbalgebroid"), (BundleMap, "map"),
         (GroupoidData, "groupoid"), (VBGroupoidData, "vbgroupoid"), (GMorphism, "gmorphism"))


def kind_of(obj) -> str:
    for cls, k in KINDS:
        if isinstance(obj, cls):
            return k
    raise TypeError(f"not a document value: {type(obj).__name__}")


def chart_of(obj) -> Chart:
    if isinstance(obj, Chart):
        return obj
    if isinstance(obj, (ChartedAction, DVB, PoissonData)):
        return obj.chart
    if isinstance(obj, AlgebroidData):
        return obj.total_chart
    if isinstance(obj, VBAlgebroidData):
        return obj.total.total_chart
    if isinstance(obj, GroupoidData):
        return obj.arrows
    if isinstance(obj, VBGroupoidData):
        return obj.groupoid.arrows
    raise TypeError(f"{kind_of(obj)} has no chart")


# argument coercions: a VB-algebroid may stand in for its algebroid, etc.
def coerce(obj, want: str):
    k = kind_of(obj)
    if want == "any" or k == want:
        return obj
    if want == "chart" and k in ("action", "dvb", "poisson", "algebroid", "vbalgebroid", "groupoid", "vbgroupoid"):
        return chart_of(obj)
    if want == "algebroid" and k == "vbalgebroid":
        return obj.total
    if want == "groupoid" and k == "vbgroupoid":
        return obj.groupoid
    if want == "action" and k == "vbalgebroid":
        return obj.action
    if want == "action" and k == "vbgroupoid":
        return obj.action
    return None


class Environment:
    def __init__(self):
        self.values: dict = {}
        self.locs: dict = {}

    def define(self, name: str, value, loc: Loc) -> None:
        if name in self.values:
            prev = self.locs[name]
            raise DSLError(f"{name!r} is already declared at {prev}", loc, "resolution")
        self.values[name] = value
        self.locs[name] = loc

    def lookup(self, ref: Ref, want: str = "any"):
        if ref.name not in self.values:
            raise DSLError(f"undeclared name {ref.name!r}", ref.loc, "resolution")
        obj = self.values[ref.name]
        out = coerce(obj, want)
        if out is None:
            raise DSLError(f"{ref.name!r} is a {kind_of(obj)}, expected a {want}", ref.loc, "resolution")
        return out

    def __getitem__(self, name: str):
        return self.values[name]

    def __contains__(self, name: str) -> bool:
        return name in self.values


# ---------------------------------------------------------------------------
# helpers


def _check_vars(entry, allowed, what: str) -> None:
    for n, loc in entry.var_locs:
        if n not in allowed:
            raise DSLError(f"undeclared name {n!r} in {what}", loc, "resolution")


def _check_key(key, allowed, what: str, loc: Loc) -> None:
    for k in (key if isinstance(key, tuple) else (key,)):
        if k not in allowed:
            raise DSLError(f"unknown {what} {k!r}", loc, "resolution")


def _components(entries, target: Chart, source_vars, what: str, loc: Loc, default_identity: bool = False) -> dict:
    comps = {}
    for e in entries:
        _check_key(e.key, target.coords, "coordinate", e.loc)
        _check_vars(e, source_vars, what)
        comps[e.key] = e.value
    missing = [c for c in target.coords if c not in comps]
    if missing and not default_identity:
        raise DSLError(f"{what} is missing components for {', '.join(missing)}", loc, "resolution")
    return comps


def _weights(entries, chart: Chart, loc_what: str) -> dict:
    out = {}
    for e in entries:
        _check_key(e.key, chart.coords, "coordinate", e.loc)
        if e.value < 0:
            raise DSLError(f"weight of {e.key} must be nonnegative", e.loc, "value")
        out[e.key] = e.value
    return out


def _wrap(fn: Callable, loc: Loc):
    try:
        return fn()
    except DSLError:
        raise
    except InternalConsistencyError:
        raise
    except ValueError as exc:
        raise DSLError(str(exc), loc, "value") from None


# ---------------------------------------------------------------------------
# declarations


def _chart(env, s: ChartDecl):
    seen = {}
    for c, loc in zip(s.coords, s.coord_locs or [s.loc] * len(s.coords)):
        if c in seen:
            raise DSLError(f"coordinate {c!r} repeated", loc, "resolution")
        if c == PARAM:
            raise DSLError(f"{PARAM!r} is reserved for the action parameter", loc, "resolution")
        seen[c] = loc
    return Chart(s.coords)


def _action(env, s: ActionDecl):
    chart = env.lookup(s.on, "chart")
    if s.form == "weights":
        w = _weights(s.entries, chart, "action")
        return _wrap(lambda: ChartedAction.diagonal(chart, w), s.loc)
    comps = _components(s.entries, chart, set(chart.coords) | {PARAM}, f"action {s.name}", s.loc, True)
    return _wrap(lambda: ChartedAction.general(chart, comps), s.loc)


def _dvb(env, s: DVBDecl):
    chart = env.lookup(s.on, "chart")
    h = _weights(s.h, chart, "dvb")
    k = _weights(s.k, chart, "dvb")
    return _wrap(lambda: DVB.from_weights(chart, h, k), s.loc)


def _poisson(env, s: PoissonDecl):
    chart = env.lookup(s.on, "chart")
    br = {}
    for e in s.entries:
        _check_key(e.key, chart.coords, "coordinate", e.loc)
        if e.key[0] == e.key[1]:
            raise DSLError(f"[{e.key[0]}, {e.key[1]}] must vanish", e.loc, "value")
        _check_vars(e, chart.coords, f"poisson {s.name}")
        br[e.key] = e.value
    return _wrap(lambda: PoissonData.from_brackets(chart, br, check=False), s.loc)


def _algebroid(env, s: AlgebroidDecl):
    base = env.lookup(s.over, "chart")
    seen = set()
    for f, loc in zip(s.frame, s.frame_locs or [s.loc] * len(s.frame)):
        if f in seen or f in base.coords or f == PARAM:
            raise DSLError(f"frame name {f!r} repeats or clashes with the base", loc, "resolution")
        seen.add(f)
    anchor = {}
    for b in s.anchor:
        _check_key(b.key, s.frame, "frame element", b.loc)
        if b.key in anchor:
            raise DSLError(f"anchor of {b.key} given twice", b.loc, "resolution")
        comps = {}
        for e in b.entries:
            _check_key(e.key, base.coords, "base coordinate", e.loc)
            _check_vars(e, base.coords, f"anchor of {b.key}")
            comps[e.key] = e.value
        anchor[b.key] = comps
    brackets = {}
    for b in s.bracket:
        _check_key(b.key, s.frame, "frame element", b.loc)
        if b.key[0] == b.key[1] or b.key in brackets or (b.key[1], b.key[0]) in brackets:
            raise DSLError(f"bracket [{b.key[0]}, {b.key[1]}] is degenerate or given twice", b.loc, "resolution")
        comps = {}
        for e in b.entries:
            _check_key(e.key, s.frame, "frame element", e.loc)
            _check_vars(e, base.coords, f"bracket [{b.key[0]}, {b.key[1]}]")
            comps[e.key] = e.value
        brackets[b.key] = comps
    return _wrap(lambda: AlgebroidData.from_dicts(base, s.frame, anchor, brackets), s.loc)


def _vbalgebroid(env, s: VBAlgebroidDecl):
    A = env.lookup(s.of, "algebroid")
    w = _weights(s.weights, A.total_chart, "vbalgebroid")
    return _wrap(lambda: VBAlgebroidData.from_weights(A, w), s.loc)


def _map(env, s: MapDecl):
    src = env.lookup(s.source)
    tgt = env.lookup(s.target)
    sc, tc = _wrap(lambda: chart_of(src), s.source.loc), _wrap(lambda: chart_of(tgt), s.target.loc)
    comps = _components(s.entries, tc, sc.coords, f"map {s.name}", s.loc)
    return BundleMap(PolyMap.from_dict(sc, tc, comps), src, tgt)


def _groupoid(env, s: GroupoidDecl):
    M = env.lookup(s.over, "chart")
    G = env.lookup(s.arrows, "chart")
    if set(M.coords) & {names.copy(c, 2) for c in G.coords}:
        raise DSLError("object names clash with second-factor arrow names", s.over.loc, "resolution")
    pair_vars = set(G.coords) | {names.copy(c, 2) for c in G.coords}
    parts = {
        "source": _components(s.source, M, G.coords, f"source of {s.name}", s.loc),
        "target": _components(s.target, M, G.coords, f"target of {s.name}", s.loc),
        "unit": _components(s.unit, G, M.coords, f"unit of {s.name}", s.loc),
        "inverse": _components(s.inverse, G, G.coords, f"inverse of {s.name}", s.loc),
        "mult": _components(s.mult, G, pair_vars, f"mult of {s.name}", s.loc),
    }
    from ..groupoid import from_maps

    return _wrap(lambda: from_maps(M.coords, G.coords, **parts), s.loc)


def _vbgroupoid(env, s: VBGroupoidDecl):
    G = env.lookup(s.of, "groupoid")
    w = _weights(s.weights, G.arrows, "vbgroupoid")
    ow = None if s.objects is None else _weights(s.objects, G.objects, "vbgroupoid")
    return _wrap(lambda: VBGroupoidData.from_weights(G, w, ow), s.loc)


def _gmorphism(env, s: GMorphismDecl):
    G1 = env.lookup(s.source, "groupoid")
    G2 = env.lookup(s.target, "groupoid")
    a = _components(s.arrows, G2.arrows, G1.arrows.coords, f"arrows of {s.name}", s.loc)
    o = _components(s.objects, G2.objects, G1.objects.coords, f"objects of {s.name}", s.loc)
    F = GroupoidMorphism(PolyMap.from_dict(G1.arrows, G2.arrows, a), PolyMap.from_dict(G1.objects, G2.objects, o))
    return GMorphism(F, G1, G2)


# ---------------------------------------------------------------------------
# constructors usable in ``let`` and ``vbkit build``


def tangent_vb(A: AlgebroidData) -> VBAlgebroidData:
    T = tangent_algebroid(A)
    dots = {names.dot(c) for c in A.total_chart.coords}
    return VBAlgebroidData.from_weights(T, {c: int(c in dots) for c in T.total_chart.coords})


def cotangent_vb(A: AlgebroidData) -> VBAlgebroidData:
    """``T*A => A*`` over ``A => M``: duals of the frame and of the base are weight 1."""
    C = cotangent_of_algebroid(A)
    ones = {names.dual(e) for e in A.frame} | {names.dual(x) for x in A.base.coords}
    return VBAlgebroidData.from_weights(C, {c: int(c in ones) for c in C.total_chart.coords})


def _fibred_product(F1: BundleMap, F2: BundleMap):
    if isinstance(F1.source, VBAlgebroidData) and isinstance(F2.source, VBAlgebroidData):
        return fibred_product_vb(F1.map, F1.source, F2.map, F2.source, F1.target)
    return fibred_product_algebroid(F1.map, _alg(F1.source), F2.map, _alg(F2.source), _alg(F1.target))


def _alg(x):
    return x.total if isinstance(x, VBAlgebroidData) else x


def _kernel(F: BundleMap):
    if not (isinstance(F.source, VBAlgebroidData) and isinstance(F.target, VBAlgebroidData)):
        raise ValueError("kernel needs a map between VB-algebroids")
    return kernel_vb(F.map, F.source, F.target)


def _lie_of_morphism(F: GMorphism) -> BundleMap:
    A1, A2 = lie_algebroid_of(F.source), lie_algebroid_of(F.target)
    return BundleMap(lie_of_morphism(F.morphism, F.source, F.target, A1, A2), A1, A2)


def _differentiate(V: VBGroupoidData) -> VBAlgebroidData:
    A, hp, rep = differentiate_action(V)
    return VBAlgebroidData(A, hp)


def _fp_groupoid(F1: GMorphism, F2: GMorphism) -> GroupoidData:
    return fibred_product_groupoid(F1.morphism, F1.source, F2.morphism, F2.source, F1.target)[0]


CONSTRUCTORS = {
    "tangent_bundle": (("chart",), tangent_bundle_algebroid),
    "tangent_algebroid": (("algebroid",), tangent_algebroid),
    "tangent_vb": (("algebroid",), tangent_vb),
    "cotangent_algebroid": (("poisson",), cotangent_algebroid),
    "cotangent_of_algebroid": (("algebroid",), cotangent_of_algebroid),
    "cotangent_vb": (("algebroid",), cotangent_vb),
    "algebroid_to_poisson": (("algebroid",), algebroid_to_poisson),
    "tangent_lift": (("poisson",), tangent_lift_poisson),
    "dual_vb": (("vbalgebroid",), dual_vb_algebroid),
    "base_algebroid": (("vbalgebroid",), base_algebroid),
    "product_algebroid": (("algebroid", "algebroid"), product_algebroid),
    "fibred_product": (("map", "map"), _fibred_product),
    "kernel": (("map",), _kernel),
    "pair_groupoid": (("chart",), lambda M: pair_groupoid(M.coords)),
    "tangent_groupoid": (("groupoid",), tangent_groupoid),
    "lie_algebroid": (("groupoid",), lie_algebroid_of),
    "lie_of_morphism": (("gmorphism",), _lie_of_morphism),
    "fixed_subgroupoid": (("vbgroupoid",), fixed_subgroupoid),
    "differentiate": (("vbgroupoid",), _differentiate),
    "vertical_bundle": (("vbgroupoid",), lambda V: vertical_bundle_groupoid(V.groupoid, V.action, V.object_action)[0]),
    "fibred_product_groupoid": (("gmorphism", "gmorphism"), _fp_groupoid),
}


def resolve_args(env: Environment, args: tuple, kinds: tuple, what: str, loc: Loc) -> list:
    variadic = kinds and kinds[-1].endswith("*")
    fixed = kinds[:-1] if variadic else kinds
    if len(args) < len(fixed) or (not variadic and len(args) != len(fixed)):
        raise DSLError(f"{what} takes {len(fixed)}{'+' if variadic else ''} arguments, got {len(args)}",
                       loc, "resolution")
    out = []
    for i, a in enumerate(args):
        want = fixed[i] if i < len(fixed) else kinds[-1][:-1]
        if want == "int":
            if not isinstance(a, int):
                raise DSLError(f"argument {i + 1} of {what} must be an integer", loc, "resolution")
            out.append(a)
            continue
        if want == "name":
            if not isinstance(a, Ref):
                raise DSLError(f"argument {i + 1} of {what} must be a name", loc, "resolution")
            out.append(a.name)
            continue
        if not isinstance(a, Ref):
            raise DSLError(f"argument {i + 1} of {what} must be a declared name", loc, "resolution")
        out.append(env.lookup(a, want))
    return out


def _let(env, s: LetDecl):
    if s.ctor not in CONSTRUCTORS:
        raise DSLError(f"unknown constructor {s.ctor!r}", s.loc, "resolution")
    kinds, fn = CONSTRUCTORS[s.ctor]
    args = resolve_args(env, s.args, kinds, s.ctor, s.loc)
    return _wrap(lambda: fn(*args), s.loc)


HANDLERS = {ChartDecl: _chart, ActionDecl: _action, DVBDecl: _dvb, PoissonDecl: _poisson,
            AlgebroidDecl: _algebroid, VBAlgebroidDecl: _vbalgebroid, MapDecl: _map,
            GroupoidDecl: _groupoid, VBGroupoidDecl: _vbgroupoid, GMorphismDecl: _gmorphism,
            LetDecl: _let}


def evaluate(doc: Document) -> Environment:
    """Build every declaration in order and resolve every check's arguments."""
    from ..checks import CHECKS

    env = Environment()
    for s in doc.statements:
        if isinstance(s, CheckDecl):
            if s.kind not in CHECKS:
                raise DSLError(f"unknown check {s.kind!r}", s.loc, "resolution")
            resolve_args(env, s.args, CHECKS[s.kind].kinds, s.kind, s.loc)
            continue
        value = HANDLERS[type(s)](env, s)
        env.define(s.name, value, s.loc)
    return env

