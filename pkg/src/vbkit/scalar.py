"""Exact polynomials over the rationals with named indeterminates.

Every coordinate expression in the package is a :class:`Scalar`.  The
distinguished parameter ``l`` (the scaling parameter lambda) is the only
indeterminate allowed to carry negative exponents, so identities that must
hold for every nonzero lambda become Laurent polynomial identities.
"""

from __future__ import annotations

import os
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

if os.environ.get("VBKIT_PURE"):
    from . import _kernels_py as _k
else:
    try:
        from . import _kernels as _k  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        from . import _kernels_py as _k

KERNEL = "compiled" if _k.__name__.endswith("._kernels") else "python"

PARAM = "l"
"""Name of the scaling parameter (lambda)."""

_mono_mul = _k.mono_mul
_mul_terms = _k.mul_terms
_add_terms = _k.add_terms
_scale_terms = _k.scale_terms


class ScalarError(ValueError):
    pass


def _coerce_coeff(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"not a rational coefficient: {c!r}")


class Scalar:
    """Immutable sparse polynomial: ``{monomial: Fraction}`` in canonical form."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | None = None, *, _trusted: bool = False):
        if terms is None:
            terms = {}
        elif not _trusted:
            clean = {}
            for mono, c in terms.items():
                c = _coerce_coeff(c)
                mono = tuple(sorted((n, int(e)) for n, e in mono if e))
                for n, e in mono:
                    if e < 0 and n != PARAM:
                        raise ScalarError(f"negative exponent on {n!r}")
                if c:
                    clean[mono] = clean.get(mono, 0) + c
            terms = {m: c for m, c in clean.items() if c}
        self._terms = terms
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, c) -> "Scalar":
        c = _coerce_coeff(c)
        return cls({(): c} if c else {}, _trusted=True)

    @classmethod
    def var(cls, name: str, exp: int = 1) -> "Scalar":
        if exp < 0 and name != PARAM:
            raise ScalarError(f"negative exponent on {name!r}")
        if exp == 0:
            return ONE
        return cls({((name, exp),): Fraction(1)}, _trusted=True)

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        from .dsl.parser import parse_expression

        return parse_expression(text)

    # inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and () in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ScalarError(f"{self} is not constant")
        return self.constant_term()

    def variables(self) -> frozenset:
        return frozenset(n for m in self._terms for n, _ in m)

    def degree(self, names: Iterable[str] | None = None) -> int:
        """Total degree, counting only ``names`` if given; -1 for zero."""
        if not self._terms:
            return -1
        if names is None:
            return max(sum(e for _, e in m) for m in self._terms)
        names = set(names)
        return max(sum(e for n, e in m if n in names) for m in self._terms)

    def weights(self, weights: Mapping[str, int]) -> set:
        """Set of weighted degrees of the monomials (unlisted names weigh 0)."""
        return {sum(weights.get(n, 0) * e for n, e in m) for m in self._terms}

    def split_by_weight(self, weights: Mapping[str, int]) -> dict:
        parts: dict = {}
        for m, c in self._terms.items():
            w = sum(weights.get(n, 0) * e for n, e in m)
            parts.setdefault(w, {})[m] = c
        return {w: Scalar(t, _trusted=True) for w, t in parts.items()}

    def coefficient(self, name: str, k: int = 1) -> "Scalar":
        """Coefficient of ``name**k`` viewing self as a polynomial in ``name``."""
        out = {}
        for m, c in self._terms.items():
            e = dict(m).get(name, 0)
            if e == k:
                out[tuple(p for p in m if p[0] != name)] = c
        return Scalar(out, _trusted=True)

    def linear_part(self, names: Iterable[str]):
        """Split as ``sum_n coeff[n]*n + rest`` when at most linear in ``names``.

        Returns ``(coeffs, rest)`` or ``None`` if some monomial has degree > 1
        in ``names``.  ``coeffs`` omits zero coefficients.
        """
        names = set(names)
        coeffs: dict = {}
        rest = {}
        for m, c in self._terms.items():
            hit = [(n, e) for n, e in m if n in names]
            if not hit:
                rest[m] = c
                continue
            if len(hit) > 1 or hit[0][1] != 1:
                return None
            n = hit[0][0]
            coeffs.setdefault(n, {})[tuple(p for p in m if p[0] != n)] = c
        return ({n: Scalar(t, _trusted=True) for n, t in coeffs.items()},
                Scalar(rest, _trusted=True))

    # arithmetic ---------------------------------------------------------
    @staticmethod
    def lift(x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, str):
            return Scalar.var(x) if x.isidentifier() else Scalar.parse(x)
        return Scalar.const(x)

    def __add__(self, other):
        try:
            other = Scalar.lift(other)
        except TypeError:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        return Scalar(_add_terms(self._terms, other._terms, 1), _trusted=True)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = Scalar.lift(other)
        except TypeError:
            return NotImplemented
        if not other._terms:
            return self
        return Scalar(_add_terms(self._terms, other._terms, -1), _trusted=True)

    def __rsub__(self, other):
        return Scalar.lift(other) - self

    def __neg__(self):
        return Scalar({m: -c for m, c in self._terms.items()}, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, Scalar):
            if not self._terms or not other._terms:
                return ZERO
            return Scalar(_mul_terms(self._terms, other._terms), _trusted=True)
        try:
            c = _coerce_coeff(other)
        except TypeError:
            return NotImplemented
        return Scalar(_scale_terms(self._terms, c), _trusted=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Scalar):
            if not other:
                raise ZeroDivisionError("division of a Scalar by zero")
            if not other.is_constant():
                return self * other._invert()
            other = other.constant_term()
        c = _coerce_coeff(other)
        if not c:
            raise ZeroDivisionError("division of a Scalar by zero")
        return self * (1 / c)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self._invert() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def _invert(self) -> "Scalar":
        if len(self._terms) != 1:
            raise ScalarError(f"cannot invert {self}")
        (m, c), = self._terms.items()
        if any(n != PARAM for n, _ in m):
            raise ScalarError(f"only monomials in {PARAM} are invertible, got {self}")
        return Scalar({tuple((n, -e) for n, e in m): 1 / c}, _trusted=True)

    # calculus -----------------------------------------------------------
    def partial(self, name: str) -> "Scalar":
        if name == PARAM:
            raise ScalarError("partial derivatives are taken in chart coordinates, not the parameter")
        out = {}
        for m, c in self._terms.items():
            for idx, (n, e) in enumerate(m):
                if n == name:
                    rest = m[:idx] + (((n, e - 1),) if e != 1 else ()) + m[idx + 1:]
                    out[rest] = c * e
                    break
        return Scalar(out, _trusted=True)

    def param_derivative(self, name: str = PARAM) -> "Scalar":
        """Formal derivative in any indeterminate, including the parameter."""
        out = {}
        for m, c in self._terms.items():
            for idx, (n, e) in enumerate(m):
                if n == name:
                    rest = m[:idx] + (((n, e - 1),) if e != 1 else ()) + m[idx + 1:]
                    out[rest] = c * e
                    break
        return Scalar(out, _trusted=True)

    def substitute(self, assignment: Mapping[str, object]) -> "Scalar":
        """Simultaneous substitution; unassigned indeterminates stay put."""
        if not self._terms or not assignment:
            return self
        images = {n: Scalar.lift(v) for n, v in assignment.items()}
        if not (self.variables() & images.keys()):
            return self
        cache: dict = {}
        acc: dict = {}
        for m, c in self._terms.items():
            keep = []
            factor = None
            for n, e in m:
                img = images.get(n)
                if img is None:
                    keep.append((n, e))
                    continue
                key = (n, e)
                p = cache.get(key)
                if p is None:
                    p = img ** e
                    cache[key] = p
                factor = p if factor is None else factor * p
            base = {tuple(keep): c}
            terms = base if factor is None else _mul_terms(base, factor._terms)
            acc = _add_terms(acc, terms, 1)
        return Scalar(acc, _trusted=True)

    def evaluate(self, point: Mapping[str, object]) -> Fraction:
        total = Fraction(0)
        for m, c in self._terms.items():
            v = c
            for n, e in m:
                if n not in point:
                    raise ScalarError(f"no value for {n!r}")
                v *= Fraction(point[n]) ** e
            total += v
        return total

    # comparison & rendering --------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self._terms == other._terms
        try:
            return self._terms == Scalar.const(other)._terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def sorted_terms(self):
        """Terms in graded lexicographic order (highest degree first)."""
        def key(item):
            m = item[0]
            return (-sum(e for _, e in m), tuple((n, -e) for n, e in m))
        return sorted(self._terms.items(), key=key)

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in m)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Scalar({str(self)!r})"


ZERO = Scalar({}, _trusted=True)
ONE = Scalar({(): Fraction(1)}, _trusted=True)
LAMBDA = Scalar({((PARAM, 1),): Fraction(1)}, _trusted=True)


def var(name: str) -> Scalar:
    return Scalar.var(name)


def const(c) -> Scalar:
    return Scalar.const(c)


def lift(x) -> Scalar:
    return Scalar.lift(x)
