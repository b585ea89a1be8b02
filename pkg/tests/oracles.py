"""Independent reference computations in sympy, plus shared strategies."""

from fractions import Fraction

import sympy as sp
from hypothesis import strategies as st

from vbkit.scalar import Scalar

VARS = ("x", "y", "z")


def to_sympy(s: Scalar):
    out = sp.Integer(0)
    for mono, c in s.items():
        term = sp.Rational(c.numerator, c.denominator)
        for n, e in mono:
            term *= sp.Symbol(n) ** e
        out += term
    return sp.expand(out)


def from_sympy(expr) -> Scalar:
    expr = sp.expand(expr)
    if expr == 0:
        return Scalar()
    gens = sorted(expr.free_symbols, key=str)
    if not gens:
        r = sp.Rational(expr)
        return Scalar.const(Fraction(int(r.p), int(r.q)))
    out = Scalar()
    for monom, coeff in sp.Poly(expr, *gens).terms():
        t = Scalar.const(Fraction(int(coeff.p), int(coeff.q)))
        for g, e in zip(gens, monom):
            if e:
                t = t * Scalar.var(str(g), e)
        out = out + t
    return out


def sympy_bracket(pi_entries: dict, coords, f, g):
    """``{f, g} = sum pi^{ij} d_i f d_j g`` from a dict ``{(a, b): expr}``."""
    syms = [sp.Symbol(c) for c in coords]
    out = 0
    for (a, b), v in pi_entries.items():
        i, j = coords.index(a), coords.index(b)
        out += v * (sp.diff(f, syms[i]) * sp.diff(g, syms[j]) - sp.diff(f, syms[j]) * sp.diff(g, syms[i]))
    return sp.expand(out)


coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def polys(draw, names=VARS, max_terms=4, max_deg=2):
    out = Scalar()
    for _ in range(draw(st.integers(0, max_terms))):
        t = Scalar.const(draw(coeffs))
        for n in names:
            e = draw(st.integers(0, max_deg))
            if e:
                t = t * Scalar.var(n, e)
        out = out + t
    return out


@st.composite
def laurent(draw, names=("x", "y"), max_terms=3):
    out = Scalar()
    for _ in range(draw(st.integers(0, max_terms))):
        t = Scalar.const(draw(coeffs)) * Scalar.var("l", draw(st.integers(-2, 2)))
        for n in names:
            t = t * Scalar.var(n, draw(st.integers(0, 2)))
        out = out + t
    return out
