"""Declaration language: lexer, parser, canonical printer, evaluator."""

from .ast import Document
from .evaluate import CONSTRUCTORS, Environment, evaluate
from .lexer import DSLError, Loc
from .parser import parse, parse_expression, parse_syntax
from .printer import print_document

__all__ = ["CONSTRUCTORS", "DSLError", "Document", "Environment", "Loc", "evaluate", "parse",
           "parse_expression", "parse_syntax", "print_document"]
