"""Declarations that rebuild a library value under a given name."""

from __future__ import annotations

from itertools import combinations

from ..actions import DVB, ChartedAction
from ..algebroid import AlgebroidData
from ..geometry import Chart, PolyMap
from ..groupoid import GroupoidData, VBGroupoidData
from ..poisson import PoissonData
from ..scalar import Scalar
from ..vb import VBAlgebroidData
from .ast import (ActionDecl, AlgebroidDecl, Block, ChartDecl, DVBDecl, Entry, GMorphismDecl,
                  GroupoidDecl, MapDecl, PoissonDecl, Ref, VBAlgebroidDecl, VBGroupoidDecl)
from .evaluate import BundleMap, GMorphism


def _comps(f: PolyMap) -> tuple:
    return tuple(Entry(c, v) for c, v in zip(f.target.coords, f.components))


def _weights(w: dict) -> tuple:
    return tuple(Entry(c, v) for c, v in w.items() if v)


def declare(name: str, value) -> list:
    if isinstance(value, Chart):
        return [ChartDecl(name, value.coords)]
    if isinstance(value, ChartedAction):
        ch = f"{name}_chart"
        out = [ChartDecl(ch, value.chart.coords)]
        h = value.detect_diagonal()
        if h.is_diagonal:
            return out + [ActionDecl(name, Ref(ch), "weights", _weights(h.weight_map()))]
        ents = tuple(Entry(c, f) for c, f in zip(value.chart.coords, value.components) if f != Scalar.var(c))
        return out + [ActionDecl(name, Ref(ch), "map", ents)]
    if isinstance(value, DVB):
        ch = f"{name}_chart"
        return [ChartDecl(ch, value.chart.coords),
                DVBDecl(name, Ref(ch), _weights(value.h.weight_map()), _weights(value.k.weight_map()))]
    if isinstance(value, PoissonData):
        ch = f"{name}_chart"
        coords = value.chart.coords
        ents = tuple(Entry((coords[i], coords[j]), value.entry(i, j))
                     for i, j in combinations(range(len(coords)), 2) if value.entry(i, j))
        return [ChartDecl(ch, coords), PoissonDecl(name, Ref(ch), ents)]
    if isinstance(value, AlgebroidData):
        ch = f"{name}_base"
        anchor = []
        for i, e in enumerate(value.frame):
            comps = tuple(Entry(x, v) for x, v in zip(value.base.coords, value.rho(i).components) if v)
            if comps:
                anchor.append(Block(e, comps))
        brackets = []
        n = value.rank
        for i, j in combinations(range(n), 2):
            comps = tuple(Entry(value.frame[k], value.c(i, j, k)) for k in range(n) if value.c(i, j, k))
            if comps:
                brackets.append(Block((value.frame[i], value.frame[j]), comps))
        return [ChartDecl(ch, value.base.coords),
                AlgebroidDecl(name, Ref(ch), value.frame, tuple(anchor), tuple(brackets))]
    if isinstance(value, VBAlgebroidData):
        inner = f"{name}_total"
        return declare(inner, value.total) + [VBAlgebroidDecl(name, Ref(inner), _weights(value.weights()))]
    if isinstance(value, BundleMap):
        s, t = f"{name}_source", f"{name}_target"
        return declare(s, value.source) + declare(t, value.target) + [
            MapDecl(name, Ref(s), Ref(t), _comps(value.map))]
    if isinstance(value, GroupoidData):
        M, A = f"{name}_objects", f"{name}_arrows"
        return [ChartDecl(M, value.objects.coords), ChartDecl(A, value.arrows.coords),
                GroupoidDecl(name, Ref(M), Ref(A), _comps(value.source), _comps(value.target),
                             _comps(value.unit), _comps(value.inverse), ("a", "b"), _comps(value.mult))]
    if isinstance(value, VBGroupoidData):
        inner = f"{name}_groupoid"
        return declare(inner, value.groupoid) + [
            VBGroupoidDecl(name, Ref(inner), _weights(value.weights()), _weights(value.object_weights()))]
    if isinstance(value, GMorphism):
        s, t = f"{name}_source", f"{name}_target"
        return declare(s, value.source) + declare(t, value.target) + [
            GMorphismDecl(name, Ref(s), Ref(t), _comps(value.morphism.arrows), _comps(value.morphism.objects))]
    raise TypeError(f"cannot declare a {type(value).__name__}")

