"""Canonical printer: ``parse_syntax(print_document(d)) == d``."""

from __future__ import annotations

from ..scalar import Scalar
from .ast import (ActionDecl, AlgebroidDecl, CheckDecl, ChartDecl, Document, DVBDecl,
                  GMorphismDecl, GroupoidDecl, LetDecl, MapDecl, PoissonDecl, Ref,
                  VBAlgebroidDecl, VBGroupoidDecl)

INDENT = "  "


def render(s: Scalar, rename=None) -> str:
    """Like ``str(s)`` with variables renamed on the fly."""
    if rename is None:
        return str(s)
    if not s:
        return "0"
    parts = []
    for m, c in s.sorted_terms():
        mono = "*".join((rename(n) if e == 1 else f"{rename(n)}^{e}") for n, e in m)
        a = abs(c)
        body = str(a) if not mono else (mono if a == 1 else f"{a}*{mono}")
        parts.append(("-" if c < 0 else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _key(k) -> str:
    return f"[{k[0]}, {k[1]}]" if isinstance(k, tuple) else k


def _value(v, rename=None) -> str:
    return str(v) if isinstance(v, int) else render(v, rename)


def inline(entries, rename=None) -> str:
    if not entries:
        return "{ }"
    return "{ " + ", ".join(f"{_key(e.key)}: {_value(e.value, rename)}" for e in entries) + " }"


def block(entries, depth: int, rename=None) -> list:
    pad = INDENT * depth
    if not entries:
        return ["{ }"]
    lines = ["{"]
    lines += [f"{pad}{INDENT}{_key(e.key)}: {_value(e.value, rename)}" for e in entries]
    lines.append(pad + "}")
    return lines


def _attach(head: str, body: list) -> list:
    return [head + " " + body[0]] + body[1:]


def _arg(a) -> str:
    return a.name if isinstance(a, Ref) else str(a)


def print_statement(s) -> str:
    if isinstance(s, ChartDecl):
        return f"chart {s.name} {{ {' '.join(s.coords)} }}" if s.coords else f"chart {s.name} {{ }}"
    if isinstance(s, ActionDecl):
        head = f"action {s.name} on {s.on.name} {s.form}"
        if s.form == "weights":
            return f"{head} {inline(s.entries)}"
        return "\n".join(_attach(head, block(s.entries, 0)))
    if isinstance(s, DVBDecl):
        return f"dvb {s.name} on {s.on.name} h {inline(s.h)} k {inline(s.k)}"
    if isinstance(s, PoissonDecl):
        return "\n".join(_attach(f"poisson {s.name} on {s.on.name}", block(s.entries, 0)))
    if isinstance(s, AlgebroidDecl):
        lines = [f"algebroid {s.name} over {s.over.name} {{"]
        lines.append(f"{INDENT}frame {{ {' '.join(s.frame)} }}" if s.frame else f"{INDENT}frame {{ }}")
        for label, blocks in (("anchor", s.anchor), ("bracket", s.bracket)):
            if blocks:
                lines.append(f"{INDENT}{label} {{")
                lines += [f"{INDENT * 2}{_key(b.key)}: {inline(b.entries)}" for b in blocks]
                lines.append(f"{INDENT}}}")
        lines.append("}")
        return "\n".join(lines)
    if isinstance(s, VBAlgebroidDecl):
        return f"vbalgebroid {s.name} of {s.of.name} weights {inline(s.weights)}"
    if isinstance(s, MapDecl):
        return "\n".join(_attach(f"map {s.name} from {s.source.name} to {s.target.name}",
                                 block(s.entries, 0)))
    if isinstance(s, GroupoidDecl):
        lines = [f"groupoid {s.name} over {s.over.name} arrows {s.arrows.name} {{"]
        for label in ("source", "target", "unit", "inverse"):
            lines += _attach(INDENT + label, block(getattr(s, label), 1))
        a, b = s.binders

        def qualify(n: str) -> str:
            if n.endswith("__2"):
                return f"{b}.{n[:-3]}"
            return f"{a}.{n}"

        lines += _attach(f"{INDENT}mult ({a}, {b})", block(s.mult, 1, qualify))
        lines.append("}")
        return "\n".join(lines)
    if isinstance(s, VBGroupoidDecl):
        out = f"vbgroupoid {s.name} of {s.of.name} weights {inline(s.weights)}"
        if s.objects is not None:
            out += f" objects {inline(s.objects)}"
        return out
    if isinstance(s, GMorphismDecl):
        lines = [f"gmorphism {s.name} from {s.source.name} to {s.target.name} {{"]
        lines += _attach(f"{INDENT}arrows", block(s.arrows, 1))
        lines += _attach(f"{INDENT}objects", block(s.objects, 1))
        lines.append("}")
        return "\n".join(lines)
    if isinstance(s, LetDecl):
        return f"let {s.name} = {s.ctor}({', '.join(_arg(a) for a in s.args)})"
    if isinstance(s, CheckDecl):
        return f"check {s.invocation()} expect {s.expect}"
    raise TypeError(f"cannot print {type(s).__name__}")


_ONE_LINERS = (ChartDecl, LetDecl, CheckDecl, VBAlgebroidDecl, VBGroupoidDecl, DVBDecl)


def print_document(doc: Document) -> str:
    out = []
    prev = None
    for s in doc.statements:
        text = print_statement(s)
        if prev is not None and not (type(prev) is type(s) and isinstance(s, _ONE_LINERS)):
            out.append("")
        out.append(text)
        prev = s
    return "\n".join(out) + "\n" if out else ""

