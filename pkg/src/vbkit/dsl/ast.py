"""Syntax tree.  Locations never take part in equality."""

from __future__ import annotations

from dataclasses import dataclass, field

from .lexer import Loc

NOWHERE = Loc(0, 0)


@dataclass(frozen=True)
class Ref:
    name: str
    loc: Loc = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class Entry:
    """``key: value``; keys are names or name pairs, values Scalars or ints."""

    key: object
    value: object
    loc: Loc = field(default=NOWHERE, compare=False)
    var_locs: tuple = field(default=(), compare=False)  # ((name, Loc), ...)


@dataclass(frozen=True)
class Block:
    """A keyed block of entries, e.g. one anchor line ``e1: { y: x }``."""

    key: object
    entries: tuple
    loc: Loc = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class ChartDecl:
    name: str
    coords: tuple
    loc: Loc = field(default=NOWHERE, compare=False)
    coord_locs: tuple = field(default=(), compare=False)


@dataclass(frozen=True)
class ActionDecl:
    name: str
    on: Ref
    form: str  # "weights" | "map"
    entries: tuple
    loc: Loc = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class DVBDecl:
    name: str
    on: Ref
    h: tuple
    k: tuple
    loc: Loc = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class PoissonDecl:
    name: str
    on: Ref
    entries: tuple
    loc: Loc = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class AlgebroidDecl:
    name: str
    over: Ref
    frame: tuple
    anchor: tuple  # Blocks keyed by frame element
    bracket: tuple  # Blocks keyed by frame pairs
    loc: Loc = field(default=NOWHERE, compare=False)
    frame_locs: tuple = field(default=(), compare=False)


@dataclass(frozen=True)
class VBAlgebroidDecl:
    name: str
    of: Ref
    weights: tuple
    loc: Loc = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class MapDecl:
    name: str
    source: Ref
    target: Ref
    entries: tuple
    loc: Loc = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class GroupoidDecl:
    name: str
    over: Ref
    arrows: Ref
    source: tuple
    target: tuple
    unit: tuple
    inverse: tuple
    binders: tuple  # (first, second) binder names of the mult block
    mult: tuple
    loc: Loc = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class VBGroupoidDecl:
    name: str
    of: Ref
    weights: tuple
    objects: tuple | None
    loc: Loc = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class GMorphismDecl:
    name: str
    source: Ref
    target: Ref
    arrows: tuple
    objects: tuple
    loc: Loc = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class LetDecl:
    name: str
    ctor: str
    args: tuple  # Refs or ints
    loc: Loc = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class CheckDecl:
    kind: str
    args: tuple
    expect: str
    loc: Loc = field(default=NOWHERE, compare=False)

    def invocation(self) -> str:
        parts = [a.name if isinstance(a, Ref) else str(a) for a in self.args]
        return f"{self.kind}({', '.join(parts)})"


DECLARATIONS = (ChartDecl, ActionDecl, DVBDecl, PoissonDecl, AlgebroidDecl, VBAlgebroidDecl,
                MapDecl, GroupoidDecl, VBGroupoidDecl, GMorphismDecl, LetDecl)


@dataclass(frozen=True)
class Document:
    statements: tuple

    @property
    def declarations(self) -> tuple:
        return tuple(s for s in self.statements if not isinstance(s, CheckDecl))

    @property
    def checks(self) -> tuple:
        return tuple(s for s in self.statements if isinstance(s, CheckDecl))
