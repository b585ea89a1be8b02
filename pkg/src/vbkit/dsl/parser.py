"""Recursive-descent parser.

``parse_syntax`` builds the tree only; ``parse`` additionally resolves every
name against the declarations (see :mod:`vbkit.dsl.evaluate`) and refuses any
document whose canonical print does not parse back to the same tree.
"""

from __future__ import annotations

from ..names import copy
from ..scalar import Scalar, ScalarError
from .ast import (ActionDecl, AlgebroidDecl, Block, CheckDecl, ChartDecl, Document, DVBDecl,
                  Entry, GMorphismDecl, GroupoidDecl, LetDecl, MapDecl, PoissonDecl, Ref,
                  VBAlgebroidDecl, VBGroupoidDecl)
from .lexer import DSLError, Token, tokenize

VERDICTS = ("pass", "fail", "unfalsified")


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0
        self.binders: tuple = ()
        self.var_locs: list = []

    # token helpers ------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def advance(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "ident") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise DSLError(f"expected {text!r}, found {self.tok}", self.tok.loc)
        return self.advance()

    def ident(self, what: str = "a name") -> Token:
        if self.tok.kind != "ident":
            raise DSLError(f"expected {what}, found {self.tok}", self.tok.loc)
        return self.advance()

    def ref(self) -> Ref:
        t = self.ident("a declared name")
        return Ref(t.text, t.loc)

    def signed_int(self) -> int:
        neg = False
        if self.at("-"):
            self.advance()
            neg = True
        if self.tok.kind != "int":
            raise DSLError(f"expected an integer, found {self.tok}", self.tok.loc)
        v = int(self.advance().text)
        return -v if neg else v

    # expressions --------------------------------------------------------
    def expression(self) -> Scalar:
        if self.at("+"):
            self.advance()
        out = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> Scalar:
        out = self.unary()
        while self.at("*") or self.at("/"):
            op = self.advance()
            rhs = self.unary()
            if op.text == "*":
                out = out * rhs
            else:
                try:
                    out = out / rhs
                except (ScalarError, ZeroDivisionError) as exc:
                    raise DSLError(f"cannot divide: {exc}", op.loc, "value") from None
        return out

    def unary(self) -> Scalar:
        if self.at("-"):
            self.advance()
            return -self.unary()
        return self.power()

    def power(self) -> Scalar:
        base = self.atom()
        if self.at("^"):
            op = self.advance()
            k = self.signed_int()
            try:
                return base ** k
            except (ScalarError, ZeroDivisionError, ValueError) as exc:
                raise DSLError(f"bad exponent: {exc}", op.loc) from None
        return base

    def atom(self) -> Scalar:
        t = self.tok
        if t.kind == "int":
            self.advance()
            return Scalar.const(int(t.text))
        if self.at("("):
            self.advance()
            e = self.expression()
            self.expect(")")
            return e
        if t.kind == "ident":
            self.advance()
            name = t.text
            if self.at("."):
                self.advance()
                sub = self.ident("a coordinate after '.'")
                if name not in self.binders:
                    raise DSLError(f"{name!r} is not a binder here", t.loc, "resolution")
                name = copy(sub.text, self.binders.index(name) + 1)
            elif self.binders:
                raise DSLError(f"{name!r} must be qualified by a binder "
                               f"({', '.join(b + '.' for b in self.binders)})", t.loc, "resolution")
            self.var_locs.append((name, t.loc))
            try:
                return Scalar.var(name)
            except (ScalarError, ValueError) as exc:
                raise DSLError(str(exc), t.loc) from None
        raise DSLError(f"expected an expression, found {t}", t.loc)

    # blocks -------------------------------------------------------------
    def key(self):
        if self.at("["):
            self.advance()
            a = self.ident().text
            self.expect(",")
            b = self.ident().text
            self.expect("]")
            return (a, b)
        return self.ident("an entry name").text

    def entries(self, value: str) -> tuple:
        """``{ key: value ... }`` with optional commas; value is expr|int|block."""
        self.expect("{")
        out = []
        seen = set()
        while not self.at("}"):
            loc = self.tok.loc
            k = self.key()
            if k in seen:
                raise DSLError(f"duplicate entry {_fmt_key(k)}", loc)
            seen.add(k)
            self.expect(":")
            if value == "int":
                out.append(Entry(k, self.signed_int(), loc))
            elif value == "block":
                out.append(Block(k, self.entries("expr"), loc))
            else:
                self.var_locs = []
                v = self.expression()
                out.append(Entry(k, v, loc, tuple(self.var_locs)))
            if self.at(","):
                self.advance()
        self.expect("}")
        return tuple(out)

    def names_block(self) -> tuple:
        self.expect("{")
        out = []
        while not self.at("}"):
            out.append(self.ident())
            if self.at(","):
                self.advance()
        self.expect("}")
        return tuple(out)

    # statements ---------------------------------------------------------
    def document(self) -> Document:
        stmts = []
        while self.tok.kind != "eof":
            stmts.append(self.statement())
        return Document(tuple(stmts))

    def statement(self):
        t = self.ident("a statement keyword")
        handler = getattr(self, f"st_{t.text}", None)
        if handler is None:
            raise DSLError(f"unknown statement {t.text!r}", t.loc)
        return handler(t)

    def st_chart(self, kw):
        name = self.ident().text
        coords = self.names_block()
        return ChartDecl(name, tuple(c.text for c in coords), kw.loc, tuple(c.loc for c in coords))

    def st_action(self, kw):
        name = self.ident().text
        self.expect("on")
        on = self.ref()
        form = self.ident("'weights' or 'map'")
        if form.text == "weights":
            return ActionDecl(name, on, "weights", self.entries("int"), kw.loc)
        if form.text == "map":
            return ActionDecl(name, on, "map", self.entries("expr"), kw.loc)
        raise DSLError(f"expected 'weights' or 'map', found {form}", form.loc)

    def st_dvb(self, kw):
        name = self.ident().text
        self.expect("on")
        on = self.ref()
        self.expect("h")
        h = self.entries("int")
        self.expect("k")
        k = self.entries("int")
        return DVBDecl(name, on, h, k, kw.loc)

    def st_poisson(self, kw):
        name = self.ident().text
        self.expect("on")
        on = self.ref()
        ents = self.entries("expr")
        for e in ents:
            if not isinstance(e.key, tuple):
                raise DSLError("Poisson entries are written [a, b]: expr", e.loc)
        return PoissonDecl(name, on, ents, kw.loc)

    def st_algebroid(self, kw):
        name = self.ident().text
        self.expect("over")
        over = self.ref()
        self.expect("{")
        self.expect("frame")
        frame = self.names_block()
        anchor, bracket = (), ()
        if self.at("anchor"):
            self.advance()
            anchor = self.entries("block")
        if self.at("bracket"):
            self.advance()
            bracket = self.entries("block")
            for b in bracket:
                if not isinstance(b.key, tuple):
                    raise DSLError("bracket entries are written [a, b]: { ... }", b.loc)
        self.expect("}")
        return AlgebroidDecl(name, over, tuple(f.text for f in frame), anchor, bracket, kw.loc,
                             tuple(f.loc for f in frame))

    def st_vbalgebroid(self, kw):
        name = self.ident().text
        self.expect("of")
        of = self.ref()
        self.expect("weights")
        return VBAlgebroidDecl(name, of, self.entries("int"), kw.loc)

    def st_map(self, kw):
        name = self.ident().text
        self.expect("from")
        src = self.ref()
        self.expect("to")
        tgt = self.ref()
        return MapDecl(name, src, tgt, self.entries("expr"), kw.loc)

    def st_groupoid(self, kw):
        name = self.ident().text
        self.expect("over")
        over = self.ref()
        self.expect("arrows")
        arrows = self.ref()
        self.expect("{")
        parts = {}
        for part in ("source", "target", "unit", "inverse"):
            self.expect(part)
            parts[part] = self.entries("expr")
        self.expect("mult")
        self.expect("(")
        a = self.ident("a binder").text
        self.expect(",")
        b = self.ident("a binder").text
        self.expect(")")
        if a == b:
            raise DSLError("binders must differ", self.tok.loc)
        self.binders = (a, b)
        try:
            mult = self.entries("expr")
        finally:
            self.binders = ()
        self.expect("}")
        return GroupoidDecl(name, over, arrows, parts["source"], parts["target"], parts["unit"],
                            parts["inverse"], (a, b), mult, kw.loc)

    def st_vbgroupoid(self, kw):
        name = self.ident().text
        self.expect("of")
        of = self.ref()
        self.expect("weights")
        w = self.entries("int")
        objs = None
        if self.at("objects"):
            self.advance()
            objs = self.entries("int")
        return VBGroupoidDecl(name, of, w, objs, kw.loc)

    def st_gmorphism(self, kw):
        name = self.ident().text
        self.expect("from")
        src = self.ref()
        self.expect("to")
        tgt = self.ref()
        self.expect("{")
        self.expect("arrows")
        arrows = self.entries("expr")
        self.expect("objects")
        objects = self.entries("expr")
        self.expect("}")
        return GMorphismDecl(name, src, tgt, arrows, objects, kw.loc)

    def args(self) -> tuple:
        self.expect("(")
        out = []
        while not self.at(")"):
            if self.tok.kind == "int" or self.at("-"):
                out.append(self.signed_int())
            else:
                out.append(self.ref())
            if not self.at(")"):
                self.expect(",")
        self.expect(")")
        return tuple(out)

    def st_let(self, kw):
        name = self.ident().text
        self.expect("=")
        ctor = self.ident("a constructor")
        return LetDecl(name, ctor.text, self.args(), kw.loc)

    def st_check(self, kw):
        kind = self.ident("a check name")
        args = self.args()
        self.expect("expect")
        v = self.ident("a verdict")
        if v.text not in VERDICTS:
            raise DSLError(f"verdict must be one of {', '.join(VERDICTS)}", v.loc)
        return CheckDecl(kind.text, args, v.text, kw.loc)


def _fmt_key(k) -> str:
    return f"[{k[0]}, {k[1]}]" if isinstance(k, tuple) else k


def parse_expression(text: str) -> Scalar:
    p = Parser(text)
    e = p.expression()
    if p.tok.kind != "eof":
        raise DSLError(f"unexpected {p.tok} after expression", p.tok.loc)
    return e


def parse_syntax(text: str) -> Document:
    return Parser(text).document()


def parse(text: str) -> Document:
    """Parse, resolve names, and confirm the canonical round trip."""
    from .evaluate import evaluate
    from .printer import print_document

    doc = parse_syntax(text)
    evaluate(doc)
    again = parse_syntax(print_document(doc))
    if again != doc:
        raise DSLError("document does not survive a canonical round trip", None, "internal")
    return doc
