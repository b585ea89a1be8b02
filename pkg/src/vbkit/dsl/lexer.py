"""Tokenizer for the declaration language."""

from __future__ import annotations

from dataclasses import dataclass

SYMBOLS = set("{}()[]:,=+-*/^.")


@dataclass(frozen=True)
class Loc:
    line: int
    col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "int" | "sym" | "eof"
    text: str
    loc: Loc

    def __str__(self):
        return "end of input" if self.kind == "eof" else repr(self.text)


class DSLError(Exception):
    """Lexical, syntax or resolution error with a source location."""

    def __init__(self, message: str, loc: Loc | None = None, kind: str = "syntax"):
        self.message = message
        self.loc = loc
        self.kind = kind
        where = f"{loc}: " if loc else ""
        super().__init__(f"{where}{kind} error: {message}")

    def to_json(self) -> dict:
        return {"kind": self.kind, "message": self.message,
                "line": self.loc.line if self.loc else None,
                "col": self.loc.col if self.loc else None}


def _ident_start(ch: str) -> bool:
    return ch == "_" or ch.isalpha()


def _ident_char(ch: str) -> bool:
    return ch == "_" or ch.isalnum()


def tokenize(text: str) -> list:
    toks = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start = Loc(line, col)
        if _ident_start(ch):
            j = i
            while j < n and _ident_char(text[j]):
                j += 1
            toks.append(Token("ident", text[i:j], start))
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and _ident_start(text[j]):
                raise DSLError(f"malformed number {text[i:j + 1]!r}", start, "lexical")
            toks.append(Token("int", text[i:j], start))
        elif ch in SYMBOLS:
            j = i + 1
            toks.append(Token("sym", ch, start))
        else:
            raise DSLError(f"unexpected character {ch!r}", start, "lexical")
        col += j - i
        i = j
    toks.append(Token("eof", "", Loc(line, col)))
    return toks
