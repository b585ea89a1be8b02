"""Lie algebroids on trivialised bundles over a single chart.

A section is a dict ``{frame_name: Scalar}``.  The bracket of sections is

    [X, Y] = sum_k (sum_ij a_i b_j c_ij^k + rho(X) b_k - rho(Y) a_k) e_k

for ``X = sum a_i e_i`` and ``Y = sum b_j e_j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

from . import names
from .geometry import Chart, PolyMap, VectorField, commutator
from .report import Report
from .scalar import ONE, PARAM, ZERO, Scalar, lift


class AlgebroidError(ValueError):
    pass


@dataclass(frozen=True)
class AlgebroidData:
    base: Chart
    frame: tuple
    anchor: tuple  # anchor[j][i]: component along base coord j of rho(e_i)
    structure: tuple  # ((i, j, k), Scalar) with i < j, nonzero entries only

    def __init__(self, base: Chart, frame: Iterable[str], anchor, structure):
        frame = tuple(frame)
        if len(set(frame)) != len(frame):
            raise AlgebroidError("repeated frame names")
        clash = set(frame) & set(base.coords)
        if clash:
            raise AlgebroidError(f"frame names clash with base coordinates: {sorted(clash)}")
        anchor = tuple(tuple(lift(x) for x in row) for row in anchor)
        if len(anchor) != base.dim or any(len(r) != len(frame) for r in anchor):
            raise AlgebroidError("anchor matrix must be (base dim) x (rank)")
        for row in anchor:
            for x in row:
                base.check_scalar(x)
        st = {}
        for (i, j, k), v in (structure.items() if isinstance(structure, Mapping) else structure):
            v = lift(v)
            if i == j:
                if v:
                    raise AlgebroidError("[e_i, e_i] must vanish")
                continue
            if i > j:
                i, j, v = j, i, -v
            base.check_scalar(v)
            st[(i, j, k)] = st.get((i, j, k), ZERO) + v
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "structure", tuple(sorted((key, v) for key, v in st.items() if v)))

    # construction -------------------------------------------------------
    @classmethod
    def from_dicts(cls, base: Chart, frame: Iterable[str],
                   anchor: Mapping[str, Mapping[str, object]] | None = None,
                   brackets: Mapping[tuple, Mapping[str, object]] | None = None) -> "AlgebroidData":
        """``anchor[e] = {coord: expr}``, ``brackets[(e1, e2)] = {e3: expr}``."""
        frame = tuple(frame)
        anchor = anchor or {}
        brackets = brackets or {}
        for e, comps in anchor.items():
            if e not in frame:
                raise AlgebroidError(f"anchor given for unknown frame element {e!r}")
            for x in comps:
                if x not in base.coords:
                    raise AlgebroidError(f"anchor component along unknown coordinate {x!r}")
        A = [[lift(anchor.get(e, {}).get(x, 0)) for e in frame] for x in base.coords]
        st = {}
        for (a, b), comps in brackets.items():
            for n in (a, b, *comps):
                if n not in frame:
                    raise AlgebroidError(f"bracket refers to unknown frame element {n!r}")
            i, j = frame.index(a), frame.index(b)
            for c, v in comps.items():
                k = frame.index(c)
                key, v = ((i, j, k), lift(v)) if i < j else ((j, i, k), -lift(v))
                st[key] = st.get(key, ZERO) + v
        return cls(base, frame, A, st)

    @classmethod
    def zero(cls, base: Chart, frame: Iterable[str]) -> "AlgebroidData":
        frame = tuple(frame)
        return cls(base, frame, [[ZERO] * len(frame) for _ in base.coords], {})

    # accessors ----------------------------------------------------------
    @property
    def rank(self) -> int:
        return len(self.frame)

    @property
    def total_chart(self) -> Chart:
        return Chart(self.base.coords + self.frame)

    def idx(self, e: str) -> int:
        try:
            return self.frame.index(e)
        except ValueError:
            raise AlgebroidError(f"unknown frame element {e!r}") from None

    def rho(self, e: str | int) -> VectorField:
        i = e if isinstance(e, int) else self.idx(e)
        return VectorField(self.base, [row[i] for row in self.anchor])

    def c(self, i: int, j: int, k: int) -> Scalar:
        if i == j:
            return ZERO
        sign = 1
        if i > j:
            i, j, sign = j, i, -1
        v = self._structure_map().get((i, j, k), ZERO)
        return v if sign == 1 else -v

    def _structure_map(self) -> dict:
        cache = self.__dict__.get("_st_cache")
        if cache is None:
            cache = dict(self.structure)
            object.__setattr__(self, "_st_cache", cache)
        return cache

    def bracket_frame(self, i: int, j: int) -> dict:
        return {self.frame[k]: self.c(i, j, k) for k in range(self.rank) if self.c(i, j, k)}

    def anchor_of(self, X: Mapping[str, Scalar]) -> VectorField:
        out = VectorField.zero(self.base)
        for e, a in X.items():
            if a:
                out = out + self.rho(e).scale(a)
        return out

    def bracket(self, X: Mapping[str, Scalar], Y: Mapping[str, Scalar]) -> dict:
        """Bracket of arbitrary sections."""
        out = {e: ZERO for e in self.frame}
        for ei, a in X.items():
            if not a:
                continue
            i = self.idx(ei)
            for ej, b in Y.items():
                if not b:
                    continue
                j = self.idx(ej)
                for k in range(self.rank):
                    ck = self.c(i, j, k)
                    if ck:
                        out[self.frame[k]] += a * b * ck
        rX = self.anchor_of(X)
        rY = self.anchor_of(Y)
        for e in self.frame:
            out[e] += rX(lift(Y.get(e, 0))) - rY(lift(X.get(e, 0)))
        return {e: v for e, v in out.items() if v}

    def rename(self, mapping: Mapping[str, str]) -> "AlgebroidData":
        base = self.base.rename(mapping)
        sub = {k: Scalar.var(v) for k, v in mapping.items() if k in self.base.coords}
        anchor = [[x.substitute(sub) for x in row] for row in self.anchor]
        st = {key: v.substitute(sub) for key, v in self.structure}
        return AlgebroidData(base, [mapping.get(e, e) for e in self.frame], anchor, st)

    def __eq__(self, other):
        if not isinstance(other, AlgebroidData):
            return NotImplemented
        return (self.base.coords == other.base.coords and self.frame == other.frame
                and self.anchor == other.anchor and self.structure == other.structure)

    def __hash__(self):
        return hash((self.base.coords, self.frame, self.anchor, self.structure))

    def describe(self) -> str:
        lines = [f"base ({', '.join(self.base.coords)}), frame ({', '.join(self.frame)})"]
        for e in self.frame:
            r = self.rho(e)
            if not r.is_zero():
                lines.append(f"  rho({e}) = {r}")
        for (i, j, k), v in self.structure:
            lines.append(f"  [{self.frame[i]}, {self.frame[j]}] has {v} * {self.frame[k]}")
        return "\n".join(lines)


def reorder(A: AlgebroidData, base: Iterable[str], frame: Iterable[str]) -> AlgebroidData:
    """Same algebroid with base coordinates and frame listed in a new order."""
    base = tuple(base)
    frame = tuple(frame)
    if sorted(base) != sorted(A.base.coords) or sorted(frame) != sorted(A.frame):
        raise AlgebroidError("reorder needs the same names")
    rho = {e: A.rho(e).as_dict() for e in A.frame}
    anchor = [[rho[e].get(x, ZERO) for e in frame] for x in base]
    pos = {e: frame.index(e) for e in A.frame}
    st = {}
    for (i, j, k), v in A.structure:
        st[(pos[A.frame[i]], pos[A.frame[j]], pos[A.frame[k]])] = v
    return AlgebroidData(Chart(base), frame, anchor, st)


def change_frame_signs(A: AlgebroidData, signs: Mapping[str, int]) -> AlgebroidData:
    """Algebroid in the frame ``e'_p = s_p e_p`` with ``s_p = +-1``."""
    s = [signs.get(e, 1) for e in A.frame]
    anchor = [[x * s[i] for i, x in enumerate(row)] for row in A.anchor]
    st = {(i, j, k): v * (s[i] * s[j] * s[k]) for (i, j, k), v in A.structure}
    return AlgebroidData(A.base, A.frame, anchor, st)


# ---------------------------------------------------------------------------
# axioms


def check_axioms(A: AlgebroidData) -> Report:
    rep = Report("algebroid_axioms")
    n = A.rank
    for i, j in combinations(range(n), 2):
        lhs = A.anchor_of(A.bracket_frame(i, j))
        rhs = commutator(A.rho(i), A.rho(j))
        for x, a, b in zip(A.base.coords, lhs.components, rhs.components):
            rep.expect_equal(f"anchor of [{A.frame[i]}, {A.frame[j]}] along {x}", a, b)
    for i, j, k in combinations(range(n), 3):
        ei, ej, ek = ({A.frame[t]: ONE} for t in (i, j, k))
        total: dict = {}
        for X, Y, Z in ((ei, ej, ek), (ej, ek, ei), (ek, ei, ej)):
            for e, v in A.bracket(A.bracket(X, Y), Z).items():
                total[e] = total.get(e, ZERO) + v
        for e in A.frame:
            rep.expect_equal(f"Jacobi ({A.frame[i]}, {A.frame[j]}, {A.frame[k]}) along {e}",
                             total.get(e, ZERO), ZERO)
    return rep


# ---------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True)
class BundleMap:
    """Fiber-linear map between algebroid total charts, split into pieces."""

    base_map: PolyMap  # A1.base -> A2.base
    matrix: tuple  # matrix[k][i] = coefficient of e2_k in phi(e1_i), functions on A1.base


def split_bundle_map(phi: PolyMap, A1: AlgebroidData, A2: AlgebroidData) -> BundleMap:
    if phi.source.coords != A1.total_chart.coords or phi.target.coords != A2.total_chart.coords:
        raise AlgebroidError("map must go between the total charts of the two algebroids")
    comps = phi.as_dict()
    base1 = set(A1.base.coords) | {PARAM}
    f = []
    for y in A2.base.coords:
        c = comps[y]
        if not c.variables() <= base1:
            raise AlgebroidError(f"base component {y} depends on fiber coordinates")
        f.append(c)
    M = []
    for e2 in A2.frame:
        lp = comps[e2].linear_part(A1.frame)
        if lp is None or lp[1]:
            raise AlgebroidError(f"component {e2} is not fiberwise linear")
        row = []
        for e1 in A1.frame:
            coef = lp[0].get(e1, ZERO)
            if not coef.variables() <= base1:
                raise AlgebroidError(f"component {e2} is not fiberwise linear")
            row.append(coef)
        M.append(tuple(row))
    return BundleMap(PolyMap(A1.base, A2.base, f), tuple(M))


def check_morphism(phi: PolyMap, A1: AlgebroidData, A2: AlgebroidData,
                   base_inverse: PolyMap | None = None) -> Report:
    """Algebroid morphism test.

    Direct anchor/bracket comparison when the base map is the identity or an
    inverse is supplied; otherwise the coisotropic dual-relation criterion.
    """
    bm = split_bundle_map(phi, A1, A2)
    f = bm.base_map
    identity_base = A1.base.coords == A2.base.coords and all(
        c == Scalar.var(x) for c, x in zip(f.components, A1.base.coords))
    if not identity_base and base_inverse is None:
        from .poisson import check_morphism_via_duality

        return check_morphism_via_duality(phi, A1, A2)
    g = PolyMap.identity(A2.base) if identity_base else base_inverse
    rep = Report("algebroid_morphism")
    fwd = dict(zip(A2.base.coords, f.components))
    back = dict(zip(A1.base.coords, g.components))
    # inverse sanity
    if not identity_base:
        for x, c in zip(A1.base.coords, g.apply(f.components)):
            if c != Scalar.var(x):
                raise AlgebroidError("supplied base inverse is not a left inverse")
    J = f.jacobian()
    M = bm.matrix
    for i, e1 in enumerate(A1.frame):
        r1 = A1.rho(i).components
        lhs = [sum((J[y][x] * r1[x] for x in range(A1.base.dim)), ZERO) for y in range(A2.base.dim)]
        rhs = [ZERO] * A2.base.dim
        for k in range(A2.rank):
            if M[k][i]:
                r2 = A2.rho(k).components
                for y in range(A2.base.dim):
                    rhs[y] += M[k][i] * r2[y].substitute(fwd)
        for y, a, b in zip(A2.base.coords, lhs, rhs):
            rep.expect_equal(f"anchor naturality for {e1} along {y}", a, b)
    # pushed sections as functions on the target base
    pushed = []
    for i in range(A1.rank):
        pushed.append({A2.frame[k]: M[k][i].substitute(back) for k in range(A2.rank) if M[k][i]})
    for i, j in combinations(range(A1.rank), 2):
        lhs = A2.bracket(pushed[i], pushed[j])
        lhs = {e: v.substitute(fwd) for e, v in lhs.items()}
        rhs = {e: ZERO for e in A2.frame}
        for k in range(A1.rank):
            ck = A1.c(i, j, k)
            if ck:
                for t in range(A2.rank):
                    if M[t][k]:
                        rhs[A2.frame[t]] += ck * M[t][k]
        for e in A2.frame:
            rep.expect_equal(f"bracket [{A1.frame[i]}, {A1.frame[j]}] along {e}",
                             lhs.get(e, ZERO), rhs[e])
    return rep


# ---------------------------------------------------------------------------
# constructions


def tangent_bundle_algebroid(chart: Chart, frame: Iterable[str] | None = None) -> AlgebroidData:
    """``TM`` with anchor the identity; frame names default to ``d<x>``."""
    frame = tuple(frame) if frame is not None else tuple(f"d{x}" for x in chart.coords)
    return AlgebroidData.from_dicts(chart, frame, {e: {x: 1} for e, x in zip(frame, chart.coords)})


def tangent_algebroid(A: AlgebroidData, tag: str = "t") -> AlgebroidData:
    """Tangent prolongation ``TA => TM`` on base ``(x, x_t)``, frame ``(e, e_t)``."""
    xs = A.base.coords
    dots = {x: names.dot(x, tag) for x in xs}
    base = Chart(xs + tuple(dots[x] for x in xs))
    frame = A.frame + tuple(names.dot(e, tag) for e in A.frame)
    n = A.rank

    def lift_fn(f: Scalar) -> Scalar:
        return sum((Scalar.var(dots[x]) * f.partial(x) for x in xs), ZERO)

    anchor = {}
    for i, e in enumerate(A.frame):
        r = A.rho(i).as_dict()
        comps = {x: v for x, v in r.items()}
        for x in xs:
            d = lift_fn(r.get(x, ZERO))
            if d:
                comps[dots[x]] = d
        anchor[e] = comps
        anchor[names.dot(e, tag)] = {dots[x]: v for x, v in r.items()}
    st = {}
    for (i, j, k), v in A.structure:
        st[(i, j, k)] = v
        dv = lift_fn(v)
        if dv:
            st[(i, j, n + k)] = dv
        st[(i, n + j, n + k)] = v
        st[(n + i, j, n + k)] = v  # [e_i_t, e_j] = -[e_j, e_i_t] = c_ij^k e_k_t
    base_anchor = [[lift(anchor.get(e, {}).get(x, 0)) for e in frame] for x in base.coords]
    return AlgebroidData(base, frame, base_anchor, st)


def cotangent_algebroid(pi) -> AlgebroidData:
    """``T*P => P`` for a Poisson chart: frame ``dz`` named ``z_s``."""
    coords = pi.chart.coords
    frame = tuple(names.dual(z) for z in coords)
    n = len(coords)
    anchor = [[pi.entry(i, j) for i in range(n)] for j in range(n)]  # row j, column i
    st = {}
    for i, j in combinations(range(n), 2):
        for k, z in enumerate(coords):
            d = pi.entry(i, j).partial(z)
            if d:
                st[(i, j, k)] = d
    return AlgebroidData(pi.chart, frame, anchor, st)


def cotangent_of_algebroid(A: AlgebroidData) -> AlgebroidData:
    """``T*A => A*`` by transport of ``T*A* => A*`` along the reversal.

    Base ``(x, a_s)``; frame ``(a, x_s)`` where ``a`` runs over the fiber
    coordinates of A (the A side) and ``x_s`` over base momenta (the core).
    The reversal fixes ``a`` and negates ``x_s``.
    """
    from .poisson import algebroid_to_poisson

    pi = algebroid_to_poisson(A)
    T = cotangent_algebroid(pi)  # frame (x_s, a) since dual(a_s) = a
    frame = A.frame + tuple(names.dual(x) for x in A.base.coords)
    T = reorder(T, T.base.coords, frame)
    return change_frame_signs(T, {names.dual(x): -1 for x in A.base.coords})


def action_algebroid(g: AlgebroidData, fields: Mapping[str, VectorField], base: Chart) -> AlgebroidData:
    """Trivial bundle ``base x g`` with anchor given by infinitesimal action fields."""
    if g.base.dim:
        raise AlgebroidError("the acting Lie algebra must live over a point")
    for e in fields:
        if e not in g.frame:
            raise AlgebroidError(f"field for unknown generator {e!r}")
    X = [fields.get(e, VectorField.zero(base)) for e in g.frame]
    for x in X:
        if x.chart.coords != base.coords:
            raise AlgebroidError("fields must live on the base chart")
    for i, j in combinations(range(g.rank), 2):
        lhs = commutator(X[i], X[j])
        rhs = VectorField.zero(base)
        for k in range(g.rank):
            ck = g.c(i, j, k)
            if ck:
                rhs = rhs + X[k].scale(ck)
        if lhs != rhs:
            raise AlgebroidError(
                f"fields are not a homomorphism: [X_{g.frame[i]}, X_{g.frame[j]}] = {lhs}, expected {rhs}")
    anchor = [[X[i].components[r] for i in range(g.rank)] for r in range(base.dim)]
    return AlgebroidData(base, g.frame, anchor, dict(g.structure))


def build_nonint_example(omega: Mapping[tuple, object], base: Iterable[str], fiber: str = "e",
                         frame: Iterable[str] | None = None, core: str = "c",
                         check_closed: bool = True, power: int = 1) -> AlgebroidData:
    """Algebroid ``TM + E + C => E`` with ``[t_i, t_j] = e^power * omega_ij * c``.

    ``omega`` maps coordinate pairs ``(x_i, x_j)`` to coefficients.  ``power``
    other than 1 produces the weight-broken variant used as a counterexample.
    """
    xs = tuple(base)
    frame = tuple(frame) if frame is not None else tuple(f"t{i + 1}" for i in range(len(xs)))
    if len(frame) != len(xs):
        raise AlgebroidError("one frame element per base coordinate")
    om = {}
    for (a, b), v in omega.items():
        i, j = xs.index(a), xs.index(b)
        v = lift(v)
        om[(i, j)] = om.get((i, j), ZERO) + v
        om[(j, i)] = om.get((j, i), ZERO) - v
    if check_closed:
        for i, j, k in combinations(range(len(xs)), 3):
            d = (om.get((j, k), ZERO).partial(xs[i]) + om.get((k, i), ZERO).partial(xs[j])
                 + om.get((i, j), ZERO).partial(xs[k]))
            if d:
                raise AlgebroidError(f"omega is not closed: d omega({xs[i]},{xs[j]},{xs[k]}) = {d}")
    chart = Chart(xs + (fiber,))
    full = frame + (core,)
    e = Scalar.var(fiber) ** power
    brackets = {}
    for i, j in combinations(range(len(xs)), 2):
        v = om.get((i, j), ZERO)
        if v:
            brackets[(frame[i], frame[j])] = {core: e * v}
    anchor = {t: {x: 1} for t, x in zip(frame, xs)}
    return AlgebroidData.from_dicts(chart, full, anchor, brackets)


def product_algebroid(A1: AlgebroidData, A2: AlgebroidData) -> AlgebroidData:
    """``A1 x A2 => M1 x M2``; names must already be disjoint."""
    base = A1.base + A2.base
    frame = A1.frame + A2.frame
    n1 = A1.rank
    anchor = [list(row) + [ZERO] * A2.rank for row in A1.anchor]
    anchor += [[ZERO] * n1 + list(row) for row in A2.anchor]
    st = dict(A1.structure)
    for (i, j, k), v in A2.structure:
        st[(n1 + i, n1 + j, n1 + k)] = v
    return AlgebroidData(base, frame, anchor, st)


def restrict_algebroid(A: AlgebroidData, base_solved: Mapping[str, Scalar],
                       fiber_solved: Mapping[str, Scalar]) -> AlgebroidData:
    """Subalgebroid cut out by solved forms on the base and on the fibers.

    ``base_solved`` expresses dependent base coordinates through free ones;
    ``fiber_solved`` expresses dependent frame coordinates as linear forms in
    the free frame coordinates with coefficients on the (restricted) base.
    Raises if the anchor is not tangent to the base or the bracket leaves the
    subbundle.
    """
    base_solved = {k: lift(v) for k, v in base_solved.items()}
    fiber_solved = {k: lift(v) for k, v in fiber_solved.items()}
    free_x = tuple(x for x in A.base.coords if x not in base_solved)
    free_e = tuple(e for e in A.frame if e not in fiber_solved)

    def restrict(f: Scalar) -> Scalar:
        return f.substitute(base_solved)

    sections = {}
    for f in free_e:
        sec = {f: ONE}
        for d, expr in fiber_solved.items():
            lp = expr.linear_part(A.frame)
            if lp is None or lp[1]:
                raise AlgebroidError(f"fiber relation for {d} is not linear")
            c = lp[0].get(f)
            if c:
                sec[d] = restrict(c)
        sections[f] = sec

    def to_free(sec: Mapping[str, Scalar], where: str) -> dict:
        sec = {e: restrict(v) for e, v in sec.items()}
        out = {e: sec.get(e, ZERO) for e in free_e if sec.get(e, ZERO)}
        for d, expr in fiber_solved.items():
            want = restrict(expr.substitute({e: out.get(e, ZERO) for e in A.frame}))
            if sec.get(d, ZERO) != want:
                raise AlgebroidError(f"{where} leaves the subbundle along {d}")
        return out

    anchor_cols = {}
    for f in free_e:
        rho = A.anchor_of(sections[f]).as_dict()
        rho = {x: restrict(v) for x, v in rho.items()}
        for y, expr in base_solved.items():
            tangent = sum((rho.get(x, ZERO) * expr.partial(x) for x in free_x), ZERO)
            if rho.get(y, ZERO) != tangent:
                raise AlgebroidError(f"anchor of {f} is not tangent to the base along {y}")
        anchor_cols[f] = rho
    anchor = [[anchor_cols[f].get(x, ZERO) for f in free_e] for x in free_x]
    st = {}
    for i, j in combinations(range(len(free_e)), 2):
        br = A.bracket(sections[free_e[i]], sections[free_e[j]])
        out = to_free(br, f"bracket [{free_e[i]}, {free_e[j]}]")
        for e, v in out.items():
            st[(i, j, free_e.index(e))] = v
    return AlgebroidData(Chart(free_x), free_e, anchor, st)
