"""Polynomial Poisson structures, linearity, and the algebroid correspondence."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

from . import names
from .algebroid import AlgebroidData, AlgebroidError, check_axioms, cotangent_algebroid, split_bundle_map
from .geometry import Chart, PolyMap, SolvedSubmanifold
from .report import Report
from .scalar import LAMBDA, ZERO, Scalar, lift


class PoissonError(ValueError):
    pass


class InternalConsistencyError(RuntimeError):
    """Two independent computations of the same property disagreed."""


@dataclass(frozen=True)
class PoissonData:
    """Bivector ``pi`` with ``{x_i, x_j} = matrix[i][j]``."""

    chart: Chart
    matrix: tuple

    def __init__(self, chart: Chart, matrix, check: bool = True):
        m = tuple(tuple(lift(x) for x in row) for row in matrix)
        n = chart.dim
        if len(m) != n or any(len(r) != n for r in m):
            raise PoissonError("bivector matrix must be square of chart dimension")
        for i in range(n):
            if m[i][i]:
                raise PoissonError(f"diagonal entry {{{chart.coords[i]}, {chart.coords[i]}}} must vanish")
            for j in range(i + 1, n):
                if m[i][j] != -m[j][i]:
                    raise PoissonError(
                        f"not antisymmetric at ({chart.coords[i]}, {chart.coords[j]})")
                chart.check_scalar(m[i][j])
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "matrix", m)
        if check:
            rep = self.jacobi_report()
            if not rep.passed:
                raise PoissonError("Jacobi identity fails: " + str(rep.violations[0]))

    @classmethod
    def from_brackets(cls, chart: Chart, brackets: Mapping[tuple, object], check: bool = True):
        n = chart.dim
        m = [[ZERO] * n for _ in range(n)]
        for (a, b), v in brackets.items():
            i, j = chart.index(a), chart.index(b)
            if i == j:
                raise PoissonError(f"{{{a}, {a}}} must vanish")
            v = lift(v)
            m[i][j] = m[i][j] + v
            m[j][i] = m[j][i] - v
        return cls(chart, m, check=check)

    def entry(self, i: int, j: int) -> Scalar:
        return self.matrix[i][j]

    def brackets(self) -> dict:
        c = self.chart.coords
        return {(c[i], c[j]): self.matrix[i][j]
                for i, j in combinations(range(self.chart.dim), 2) if self.matrix[i][j]}

    def bracket(self, f, g) -> Scalar:
        f, g = lift(f), lift(g)
        df = [f.partial(x) for x in self.chart.coords]
        dg = [g.partial(x) for x in self.chart.coords]
        acc = ZERO
        for i, a in enumerate(df):
            if not a:
                continue
            for j, b in enumerate(dg):
                if b and self.matrix[i][j]:
                    acc = acc + self.matrix[i][j] * a * b
        return acc

    def hamiltonian(self, f):
        from .geometry import VectorField

        return VectorField(self.chart, [self.bracket(x, f) for x in self.chart.variables()])

    def jacobi_report(self) -> Report:
        rep = Report("poisson_jacobi")
        c = self.chart.coords
        xs = self.chart.variables()
        for i, j, k in combinations(range(self.chart.dim), 3):
            s = (self.bracket(xs[i], self.matrix[j][k]) + self.bracket(xs[j], self.matrix[k][i])
                 + self.bracket(xs[k], self.matrix[i][j]))
            rep.expect_equal(f"Jacobi ({c[i]}, {c[j]}, {c[k]})", s, ZERO)
        return rep

    def scaled(self, c) -> "PoissonData":
        return PoissonData(self.chart, [[x * lift(c) for x in r] for r in self.matrix], check=False)

    def rename(self, mapping: Mapping[str, str]) -> "PoissonData":
        sub = {k: Scalar.var(v) for k, v in mapping.items()}
        return PoissonData(self.chart.rename(mapping),
                           [[x.substitute(sub) for x in r] for r in self.matrix], check=False)

    def product(self, other: "PoissonData") -> "PoissonData":
        """Direct product on the concatenated chart (names must be disjoint)."""
        chart = self.chart + other.chart
        n, m = self.chart.dim, other.chart.dim
        mat = [[ZERO] * (n + m) for _ in range(n + m)]
        for i in range(n):
            for j in range(n):
                mat[i][j] = self.matrix[i][j]
        for i in range(m):
            for j in range(m):
                mat[n + i][n + j] = other.matrix[i][j]
        return PoissonData(chart, mat, check=False)

    def __eq__(self, other):
        if not isinstance(other, PoissonData):
            return NotImplemented
        return self.chart.coords == other.chart.coords and self.matrix == other.matrix

    def __hash__(self):
        return hash((self.chart.coords, self.matrix))

    def __str__(self):
        body = ", ".join(f"{{{a}, {b}}} = {v}" for (a, b), v in self.brackets().items())
        return body or "0"


# ---------------------------------------------------------------------------
# maps and relations


def check_poisson_map(f: PolyMap, pi1: PoissonData, pi2: PoissonData, scale=1) -> Report:
    """``J pi1 J^T == scale * (pi2 o f)``; ``scale`` may involve ``l``."""
    if f.source.coords != pi1.chart.coords or f.target.coords != pi2.chart.coords:
        raise PoissonError("map charts do not match the Poisson charts")
    rep = Report("poisson_map")
    scale = lift(scale)
    sub = dict(zip(pi2.chart.coords, f.components))
    t = pi2.chart.coords
    comps = f.components
    for a, b in combinations(range(len(t)), 2):
        lhs = pi1.bracket(comps[a], comps[b])
        rhs = scale * pi2.matrix[a][b].substitute(sub)
        rep.expect_equal(f"{{{t[a]}, {t[b]}}}", lhs, rhs)
    return rep


def check_linear(pi: PoissonData, fibers: Iterable[str]) -> Report:
    """Linearity of ``pi`` for the vector bundle with fiber coordinates ``fibers``.

    Computed twice: by degree inspection, and by the identity
    ``h_l^* pi = l * pi`` for the fiberwise homothety.  Disagreement raises.
    """
    fibers = tuple(fibers)
    F = set(fibers)
    bad = F - set(pi.chart.coords)
    if bad:
        raise PoissonError(f"fiber names not in chart: {sorted(bad)}")
    rep = Report("poisson_linear")
    c = pi.chart.coords
    degree_ok = True
    failing = []
    for i, j in combinations(range(pi.chart.dim), 2):
        v = pi.matrix[i][j]
        if not v:
            continue
        need = int(c[i] in F) + int(c[j] in F) - 1
        degs = {sum(e for n, e in m if n in F) for m, _ in v.items()}
        if need < 0 or degs != {need}:
            degree_ok = False
            failing.append([c[i], c[j]])
            rep.fail(f"{{{c[i]}, {c[j]}}} has fiber degrees {sorted(degs)}",
                     v, f"homogeneous of fiber degree {max(need, 0)}" if need >= 0 else "0")
    comps = [LAMBDA * Scalar.var(x) if x in F else Scalar.var(x) for x in c]
    h = PolyMap(pi.chart, pi.chart, comps)
    lam_ok = check_poisson_map(h, pi, pi, LAMBDA).passed
    rep.details["failing"] = failing
    rep.details["degree"] = degree_ok
    rep.details["homothety"] = lam_ok
    if degree_ok != lam_ok:
        raise InternalConsistencyError(
            f"linearity by degree ({degree_ok}) disagrees with homothety identity ({lam_ok})")
    return rep


def check_coisotropic_relation(rel: SolvedSubmanifold, pi1: PoissonData, pi2: PoissonData) -> Report:
    """Coisotropy of a relation in ``P1 x P2bar`` (bivector ``pi1 - pi2``)."""
    if rel.ambient.coords != pi1.chart.coords + pi2.chart.coords:
        raise PoissonError("relation must live in the product chart")
    prod = pi1.product(pi2.scaled(-1))
    rep = Report("coisotropic_relation")
    gens = rel.generators()
    keys = list(gens)
    for a, b in combinations(keys, 2):
        v = rel.restrict(prod.bracket(gens[a], gens[b]))
        rep.expect_equal(f"{{g_{a}, g_{b}}} on relation", v, ZERO)
    return rep


# ---------------------------------------------------------------------------
# algebroid <-> linear Poisson


def free_dual_names(A: AlgebroidData) -> dict:
    """``dual(e)`` for each frame element, suffixed with ``__d`` on a clash."""
    taken = set(A.base.coords) | set(A.frame)
    out = {}
    for e in A.frame:
        n = names.dual(e)
        while n in taken:
            n = n + "__d"
        taken.add(n)
        out[e] = n
    return out


def algebroid_to_poisson(A: AlgebroidData, dual_names: Mapping[str, str] | None = None) -> PoissonData:
    """Linear Poisson structure on ``A*`` with chart ``(x, dual(e))``.

    Dual names that would clash get a ``__d`` suffix (see :func:`free_dual_names`).

    ``{xi_i, xi_j} = c_ij^k xi_k`` and ``{xi_i, x^j} = rho^j_i``.
    """
    dn = free_dual_names(A)
    dn.update(dual_names or {})
    xis = tuple(dn[e] for e in A.frame)
    chart = Chart(A.base.coords + xis)
    nb = A.base.dim
    n = nb + A.rank
    m = [[ZERO] * n for _ in range(n)]
    for i in range(A.rank):
        for j in range(nb):
            v = A.anchor[j][i]
            m[nb + i][j] = v
            m[j][nb + i] = -v
    for (i, j, k), v in A.structure:
        t = v * Scalar.var(xis[k])
        m[nb + i][nb + j] = m[nb + i][nb + j] + t
        m[nb + j][nb + i] = m[nb + j][nb + i] - t
    return PoissonData(chart, m, check=False)


def poisson_to_algebroid(pi: PoissonData, fibers: Iterable[str],
                         frame_names: Mapping[str, str] | None = None) -> AlgebroidData:
    """Inverse of :func:`algebroid_to_poisson` for a linear structure."""
    fibers = tuple(fibers)
    rep = check_linear(pi, fibers)
    if not rep.passed:
        raise PoissonError("bivector is not linear: " + str(rep.violations[0]))
    frame_names = dict(frame_names or {})
    F = set(fibers)
    base = tuple(x for x in pi.chart.coords if x not in F)
    fib = tuple(x for x in pi.chart.coords if x in F)
    frame = tuple(frame_names.get(z, names.dual(z)) for z in fib)
    idx = {x: pi.chart.index(x) for x in pi.chart.coords}
    anchor = [[pi.matrix[idx[z]][idx[x]] for z in fib] for x in base]
    st = {}
    for a, b in combinations(range(len(fib)), 2):
        v = pi.matrix[idx[fib[a]]][idx[fib[b]]]
        if not v:
            continue
        lp = v.linear_part(fib)
        for k, z in enumerate(fib):
            cf = lp[0].get(z)
            if cf:
                st[(a, b, k)] = cf
    return AlgebroidData(Chart(base), frame, anchor, st)


def check_morphism_via_duality(phi: PolyMap, A1: AlgebroidData, A2: AlgebroidData) -> Report:
    """Morphism test through the dual relation in ``A1* x A2*bar``.

    The relation is ``{(x1, Phi^T xi2, f(x1), xi2)}``; the map is a morphism
    iff this relation is coisotropic.
    """
    bm = split_bundle_map(phi, A1, A2)
    pi1 = algebroid_to_poisson(A1, free_dual_names(A1))
    taken = set(pi1.chart.coords)
    pi2 = algebroid_to_poisson(A2, free_dual_names(A2))
    ren = {}
    for x in pi2.chart.coords:
        if x in taken:
            new = names.copy(x, 2)
            while new in taken or new in pi2.chart.coords:
                new = new + "_"
            ren[x] = new
    pi2 = pi2.rename(ren)
    nb1, nb2 = A1.base.dim, A2.base.dim
    xi1 = pi1.chart.coords[nb1:]
    x2 = pi2.chart.coords[:nb2]
    xi2 = pi2.chart.coords[nb2:]
    solved = {}
    for y, c in zip(x2, bm.base_map.components):
        solved[y] = c
    for i, name in enumerate(xi1):
        solved[name] = sum((bm.matrix[k][i] * Scalar.var(xi2[k]) for k in range(A2.rank)
                            if bm.matrix[k][i]), ZERO)
    rel = SolvedSubmanifold(pi1.chart + pi2.chart, solved)
    rep = check_coisotropic_relation(rel, pi1, pi2)
    out = Report("algebroid_morphism")
    out.details["method"] = "duality"
    return out.absorb(rep, "dual relation")


# ---------------------------------------------------------------------------
# tangent lift


def tangent_lift_poisson(pi: PoissonData, fibers: Iterable[str] | None = None,
                         tag: str = "t") -> PoissonData:
    """Tangent lift on ``TP`` with chart ``(z, z_t)``.

    Obtained as the linear Poisson structure dual to ``T*P``.  When ``fibers``
    is given, ``pi`` must be linear for them and the result is checked to be
    linear for the tangent fibration as well.
    """
    T = cotangent_algebroid(pi)
    dots = {names.dual(z): names.dot(z, tag) for z in pi.chart.coords}
    out = algebroid_to_poisson(T, dots)
    rep = check_linear(out, tuple(dots.values()))
    if not rep.passed:
        raise InternalConsistencyError("tangent lift is not linear over the base")
    if fibers is not None:
        fibers = tuple(fibers)
        if not check_linear(pi, fibers).passed:
            raise PoissonError("base structure is not linear for the given fibers")
        both = fibers + tuple(names.dot(z, tag) for z in fibers)
        if not check_linear(out, both).passed:
            raise InternalConsistencyError("tangent lift is not linear over the tangent base")
    return out


def koszul_bracket(pi: PoissonData, alpha: Mapping[str, Scalar], beta: Mapping[str, Scalar]) -> dict:
    """Koszul bracket of 1-forms ``sum a_i dz^i`` written as ``{z: a}``.

    ``[a, b] = L_{pi#a} b - L_{pi#b} a - d pi(a, b)``.
    """
    c = pi.chart.coords
    n = len(c)
    A = [lift(alpha.get(z, 0)) for z in c]
    B = [lift(beta.get(z, 0)) for z in c]

    def sharp(f):
        return [sum((f[i] * pi.matrix[i][j] for i in range(n)), ZERO) for j in range(n)]

    def lie(X, form):
        out = []
        for k in range(n):
            v = sum((X[j] * form[k].partial(c[j]) for j in range(n)), ZERO)
            v = v + sum((form[j] * X[j].partial(c[k]) for j in range(n)), ZERO)
            out.append(v)
        return out

    pa, pb = sharp(A), sharp(B)
    pab = sum((A[i] * pi.matrix[i][j] * B[j] for i in range(n) for j in range(n)), ZERO)
    la, lb = lie(pa, B), lie(pb, A)
    return {c[k]: la[k] - lb[k] - pab.partial(c[k]) for k in range(n)
            if la[k] - lb[k] - pab.partial(c[k])}


__all__ = [
    "PoissonData", "PoissonError", "InternalConsistencyError", "check_poisson_map", "check_linear",
    "check_coisotropic_relation", "algebroid_to_poisson", "poisson_to_algebroid",
    "check_morphism_via_duality", "tangent_lift_poisson", "koszul_bracket", "AlgebroidError",
    "check_axioms",
]
