"""Lie bialgebroid compatibility ``d*[X, Y] = [d*X, Y] + (-1)^(|X|-1) [X, d*Y]``.

Multivectors of degree 0, 1, 2 over the A-frame are a Scalar, ``{e: f}`` and
``{(e_i, e_j): f}`` (pairs in frame order).  Schouten conventions:

    [X, f] = rho(X) f          [f, X] = -rho(X) f
    [X^Y, f] = (rho(Y) f) X - (rho(X) f) Y
    [P, Z] = sum P^ij (e_i ^ [e_j, Z] + [e_i, Z] ^ e_j) - (rho(Z) P^ij) e_i ^ e_j

Both sides of the identity are derivations in each argument, so it suffices
to check it on the generators: frame sections and coordinate functions.  If
``D(X, Y)`` denotes the defect, ``D(X, gY) = g D(X, Y) + (terms in D(X, g))``
and likewise in the first slot, so vanishing on generators propagates to all
sections and functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping

from . import names
from .algebroid import AlgebroidData, check_axioms
from .report import Report
from .scalar import ZERO, Scalar, lift


class BialgebroidError(ValueError):
    pass


@dataclass(frozen=True)
class BialgebroidData:
    A: AlgebroidData
    Astar: AlgebroidData
    pairing: tuple  # ((e, xi), ...) in A-frame order

    def __init__(self, A: AlgebroidData, Astar: AlgebroidData, pairing: Mapping[str, str] | None = None):
        if A.base.coords != Astar.base.coords:
            raise BialgebroidError("A and A* must share the base chart")
        if pairing is None:
            pairing = {e: names.dual(e) for e in A.frame}
        if sorted(pairing) != sorted(A.frame) or sorted(pairing.values()) != sorted(Astar.frame):
            raise BialgebroidError("pairing must match the two frames one to one")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "Astar", Astar)
        object.__setattr__(self, "pairing", tuple((e, pairing[e]) for e in A.frame))

    @classmethod
    def from_poisson(cls, A: AlgebroidData, pi) -> "BialgebroidData":
        """A linear Poisson structure on the total space of A gives A*."""
        from .poisson import poisson_to_algebroid

        if pi.chart.coords != A.total_chart.coords:
            raise BialgebroidError("Poisson structure must live on the total chart of A")
        taken = set(A.base.coords)
        fnames = {}
        for e in A.frame:
            n = names.dual(e)
            while n in taken:
                n = names.copy(n, 2) if "__" not in n else n + "_"
            fnames[e] = n
            taken.add(n)
        S = poisson_to_algebroid(pi, A.frame, fnames)
        return cls(A, S, fnames)

    def swapped(self) -> "BialgebroidData":
        return BialgebroidData(self.Astar, self.A, {xi: e for e, xi in self.pairing})

    # ------------------------------------------------------------------
    def _star_index(self) -> list:
        return [self.Astar.idx(xi) for _, xi in self.pairing]

    def cstar(self, i: int, j: int, k: int) -> Scalar:
        s = self._star_index()
        return self.Astar.c(s[i], s[j], s[k])

    def rho_star(self, i: int):
        return self.Astar.rho(self._star_index()[i])


def dstar_on_function(B: BialgebroidData, f) -> dict:
    """``d* f = sum (rho*(xi_i) f) e_i``."""
    f = lift(f)
    out = {}
    for i, e in enumerate(B.A.frame):
        v = B.rho_star(i)(f)
        if v:
            out[e] = v
    return out


def dstar_on_section(B: BialgebroidData, X) -> dict:
    """Bivector ``d* X``; for a frame element ``d* e_k = -sum c*_ij^k e_i ^ e_j``."""
    if isinstance(X, str):
        X = {X: Scalar.const(1)}
    fr = B.A.frame
    out: dict = {}
    for ek, a in X.items():
        a = lift(a)
        if not a:
            continue
        k = fr.index(ek)
        for i, j in combinations(range(len(fr)), 2):
            c = B.cstar(i, j, k)
            if c:
                _add2(out, fr, fr[i], fr[j], -a * c)
        for e, g in dstar_on_function(B, a).items():
            _add2(out, fr, e, ek, g)
    return {k: v for k, v in out.items() if v}


def dstar_matrix(B: BialgebroidData, ek: str) -> list:
    """``d* e_k`` as an antisymmetric matrix over the A-frame."""
    fr = B.A.frame
    P = dstar_on_section(B, ek)
    m = [[ZERO] * len(fr) for _ in fr]
    for (a, b), v in P.items():
        i, j = fr.index(a), fr.index(b)
        m[i][j] = v
        m[j][i] = -v
    return m


def _add2(P: dict, fr, a: str, b: str, v: Scalar) -> None:
    if a == b or not v:
        return
    if fr.index(a) > fr.index(b):
        a, b, v = b, a, -v
    P[(a, b)] = P.get((a, b), ZERO) + v


def _wedge(X: Mapping, Y: Mapping, fr) -> dict:
    out: dict = {}
    for a, f in X.items():
        for b, g in Y.items():
            _add2(out, fr, a, b, f * g)
    return out


# ---------------------------------------------------------------------------
# Schouten brackets for degrees <= 2 against degrees <= 1


def schouten(A: AlgebroidData, P, Q, dp: int, dq: int):
    fr = A.frame
    if dp == 0 and dq == 0:
        return ZERO
    if dp == 1 and dq == 0:
        return A.anchor_of(P)(Q)
    if dp == 0 and dq == 1:
        return -A.anchor_of(Q)(P)
    if dp == 1 and dq == 1:
        return A.bracket(P, Q)
    if dp == 2 and dq == 0:
        out: dict = {}
        for (a, b), w in P.items():
            fa = A.rho(a)(Q)
            fb = A.rho(b)(Q)
            for e, v in ((a, w * fb), (b, -w * fa)):
                if v:
                    out[e] = out.get(e, ZERO) + v
        return {k: v for k, v in out.items() if v}
    if dp == 0 and dq == 2:
        return schouten(A, Q, P, 2, 0)
    if dp == 2 and dq == 1:
        out = {}
        rZ = A.anchor_of(Q)
        for (a, b), w in P.items():
            ea = {a: Scalar.const(1)}
            eb = {b: Scalar.const(1)}
            for k, v in _wedge(ea, A.bracket(eb, Q), fr).items():
                out[k] = out.get(k, ZERO) + w * v
            for k, v in _wedge(A.bracket(ea, Q), eb, fr).items():
                out[k] = out.get(k, ZERO) + w * v
            _add2(out, fr, a, b, -rZ(w))
        return {k: v for k, v in out.items() if v}
    if dp == 1 and dq == 2:
        r = schouten(A, Q, P, 2, 1)
        return {k: -v for k, v in r.items()}
    raise BialgebroidError(f"Schouten bracket of degrees {dp}, {dq} not needed")


def _dstar(B: BialgebroidData, X, d: int):
    if d == 0:
        return dstar_on_function(B, X), 1
    if d == 1:
        return dstar_on_section(B, X), 2
    raise BialgebroidError("d* only needed on functions and sections")


def _sub(P, Q):
    if isinstance(P, Scalar) or isinstance(Q, Scalar):
        return lift(P) - lift(Q)
    out = dict(P)
    for k, v in Q.items():
        out[k] = out.get(k, ZERO) - v
    return {k: v for k, v in out.items() if v}


def _add(P, Q):
    if isinstance(P, Scalar) or isinstance(Q, Scalar):
        return lift(P) + lift(Q)
    out = dict(P)
    for k, v in Q.items():
        out[k] = out.get(k, ZERO) + v
    return {k: v for k, v in out.items() if v}


def _fmt(P) -> str:
    if isinstance(P, Scalar):
        return str(P)
    if not P:
        return "0"
    parts = []
    for k in sorted(P, key=str):
        label = "^".join(k) if isinstance(k, tuple) else k
        parts.append(f"({P[k]})*{label}")
    return " + ".join(parts)


def _is_zero(P) -> bool:
    return not P if not isinstance(P, Scalar) else P.is_zero()


def check_bialgebroid(B: BialgebroidData, require_axioms: bool = True) -> Report:
    rep = Report("bialgebroid")
    if require_axioms:
        rep.absorb(check_axioms(B.A), "A axioms")
        rep.absorb(check_axioms(B.Astar), "A* axioms")
        if not rep.passed:
            return rep
    A = B.A
    gens = [(e, {e: Scalar.const(1)}, 1) for e in A.frame]
    gens += [(x, Scalar.var(x), 0) for x in A.base.coords]
    failing = []
    for (nx, X, dx), (ny, Y, dy) in ((g, h) for g in gens for h in gens if g[0] != h[0]):
        br = schouten(A, X, Y, dx, dy)
        dbr = dx + dy - 1
        lhs = ZERO if dbr < 0 else _dstar(B, br, dbr)[0]
        dX, ddx = _dstar(B, X, dx)
        dY, ddy = _dstar(B, Y, dy)
        t1 = schouten(A, dX, Y, ddx, dy)
        t2 = schouten(A, X, dY, dx, ddy)
        rhs = _add(t1, t2) if (dx - 1) % 2 == 0 else _sub(t1, t2)
        defect = _sub(lhs, rhs)
        if not _is_zero(defect):
            failing.append([nx, ny])
            rep.fail(f"d*[{nx}, {ny}]", _fmt(lhs), _fmt(rhs))
    rep.details["failing_pairs"] = failing
    return rep


def sharp_map(B: BialgebroidData):
    """``pi^#: T*A -> TA`` for the linear Poisson structure dual to ``A*``.

    Source chart is that of :func:`cotangent_of_algebroid`, target that of
    :func:`tangent_algebroid`; momenta contract the first index of ``pi``.
    """
    from .algebroid import cotangent_of_algebroid, tangent_algebroid
    from .geometry import PolyMap
    from .poisson import algebroid_to_poisson

    A = B.A
    pi = algebroid_to_poisson(B.Astar, {xi: e for e, xi in B.pairing})
    src = cotangent_of_algebroid(A)
    tgt = tangent_algebroid(A)
    coords = pi.chart.coords
    mom = {z: Scalar.var(names.dual(z)) for z in coords}

    def sharp(b: str) -> Scalar:
        j = pi.chart.index(b)
        return sum((mom[a] * pi.entry(i, j) for i, a in enumerate(coords) if pi.entry(i, j)), ZERO)

    comps = {x: Scalar.var(x) for x in A.base.coords}
    comps.update({e: Scalar.var(e) for e in A.frame})
    comps.update({names.dot(z): sharp(z) for z in coords})
    return PolyMap.from_dict(src.total_chart, tgt.total_chart, comps), src, tgt


def check_sharp_morphism(B: BialgebroidData) -> Report:
    """``pi^#`` as an algebroid map ``T*A => A*`` to ``TA => TM``."""
    from .algebroid import check_morphism

    phi, src, tgt = sharp_map(B)
    rep = Report("sharp_morphism")
    return rep.absorb(check_morphism(phi, src, tgt), "pi^#")
