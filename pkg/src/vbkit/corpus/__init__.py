"""Fixture documents shipped with the package."""

from __future__ import annotations

from pathlib import Path

CORPUS_DIR = Path(__file__).resolve().parent


def files() -> list:
    return sorted(CORPUS_DIR.glob("*.vb"))


def path(name: str) -> Path:
    p = CORPUS_DIR / (name if name.endswith(".vb") else name + ".vb")
    if not p.exists():
        raise FileNotFoundError(f"no corpus file {p.name}")
    return p


def text(name: str) -> str:
    return path(name).read_text(encoding="utf-8")


def load(name: str):
    """Parse and evaluate a corpus file; returns ``(document, environment)``."""
    from ..dsl import evaluate, parse

    doc = parse(text(name))
    return doc, evaluate(doc)
