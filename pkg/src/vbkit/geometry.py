"""Charts, polynomial maps, vector fields and solved-form submanifolds."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .scalar import ONE, PARAM, ZERO, Scalar, lift

Matrix = list  # list of rows of Scalars


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    """Ordered coordinate names plus optional weight tags per action label."""

    coords: tuple
    tags: tuple = ()  # ((label, ((coord, weight), ...)), ...)

    def __init__(self, coords: Iterable[str], tags: Mapping | None = None):
        coords = tuple(coords)
        if len(set(coords)) != len(coords):
            raise GeometryError(f"repeated coordinate names in {coords}")
        if PARAM in coords:
            raise GeometryError(f"'{PARAM}' is reserved for the scaling parameter")
        object.__setattr__(self, "coords", coords)
        norm = []
        for label, ws in sorted((tags or {}).items()):
            ws = dict(ws)
            bad = set(ws) - set(coords)
            if bad:
                raise GeometryError(f"weight tags for unknown coordinates {sorted(bad)}")
            if any(w < 0 for w in ws.values()):
                raise GeometryError("weights must be nonnegative")
            norm.append((label, tuple((c, ws.get(c, 0)) for c in coords)))
        object.__setattr__(self, "tags", tuple(norm))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __contains__(self, name) -> bool:
        return name in self.coords

    def index(self, name: str) -> int:
        try:
            return self.coords.index(name)
        except ValueError:
            raise GeometryError(f"unknown coordinate {name!r}") from None

    def weights(self, label: str) -> dict:
        for lab, ws in self.tags:
            if lab == label:
                return dict(ws)
        raise GeometryError(f"no weight tags for action {label!r}")

    def variables(self) -> list:
        return [Scalar.var(c) for c in self.coords]

    def rename(self, mapping: Mapping[str, str]) -> "Chart":
        return Chart([mapping.get(c, c) for c in self.coords])

    def __add__(self, other: "Chart") -> "Chart":
        return Chart(self.coords + tuple(other.coords))

    def check_scalar(self, f: Scalar, allow_param: bool = False) -> None:
        extra = f.variables() - set(self.coords)
        if allow_param:
            extra -= {PARAM}
        if extra:
            raise GeometryError(f"{f} uses names outside chart {self.coords}: {sorted(extra)}")


def tangent_chart(chart: Chart, tag: str = "t") -> Chart:
    from .names import dot

    return Chart(chart.coords + tuple(dot(c, tag) for c in chart.coords))


# ---------------------------------------------------------------------------
# matrices


def zeros(rows: int, cols: int) -> Matrix:
    return [[ZERO] * cols for _ in range(rows)]


def identity_matrix(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if a and b and len(a[0]) != len(b):
        raise GeometryError("matrix shape mismatch")
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        new = []
        for j in range(cols):
            acc = ZERO
            for k, x in enumerate(row):
                if x and b[k][j]:
                    acc = acc + x * b[k][j]
            new.append(acc)
        out.append(new)
    return out


def transpose(a: Matrix) -> Matrix:
    return [list(r) for r in zip(*a)] if a else []


def mat_subs(a: Matrix, assignment: Mapping) -> Matrix:
    return [[x.substitute(assignment) for x in row] for row in a]


def mat_scale(a: Matrix, c) -> Matrix:
    c = lift(c)
    return [[x * c for x in row] for row in a]


def mat_diff(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_is_zero(a: Matrix) -> bool:
    return all(not x for row in a for x in row)


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True)
class PolyMap:
    """A polynomial map; components may also involve the parameter ``l``."""

    source: Chart
    target: Chart
    components: tuple

    def __init__(self, source: Chart, target: Chart, components: Iterable):
        comps = tuple(lift(c) for c in components)
        if len(comps) != target.dim:
            raise GeometryError(
                f"map into {target.coords} needs {target.dim} components, got {len(comps)}")
        for c in comps:
            source.check_scalar(c, allow_param=True)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "components", comps)

    @classmethod
    def identity(cls, chart: Chart) -> "PolyMap":
        return cls(chart, chart, chart.variables())

    @classmethod
    def from_dict(cls, source: Chart, target: Chart, comps: Mapping) -> "PolyMap":
        missing = set(target.coords) - set(comps)
        if missing:
            raise GeometryError(f"missing components for {sorted(missing)}")
        return cls(source, target, [comps[c] for c in target.coords])

    def as_dict(self) -> dict:
        return dict(zip(self.target.coords, self.components))

    def __getitem__(self, name: str) -> Scalar:
        return self.components[self.target.index(name)]

    def apply(self, values: Mapping | Sequence) -> tuple:
        """Substitute ``values`` for the source coordinates."""
        if not isinstance(values, Mapping):
            values = dict(zip(self.source.coords, values))
        return tuple(c.substitute(values) for c in self.components)

    def at_param(self, value) -> "PolyMap":
        return PolyMap(self.source, self.target,
                       [c.substitute({PARAM: value}) for c in self.components])

    def jacobian(self) -> Matrix:
        return [[c.partial(x) for x in self.source.coords] for c in self.components]

    def is_identity(self) -> bool:
        return self.source == self.target and all(
            c == Scalar.var(x) for c, x in zip(self.components, self.source.coords))

    def __eq__(self, other):
        if not isinstance(other, PolyMap):
            return NotImplemented
        return (self.source.coords == other.source.coords
                and self.target.coords == other.target.coords
                and self.components == other.components)

    def __hash__(self):
        return hash((self.source.coords, self.target.coords, self.components))

    def __str__(self):
        body = ", ".join(f"{n}: {c}" for n, c in zip(self.target.coords, self.components))
        return f"({', '.join(self.source.coords)}) -> {{{body}}}"


def compose(g: PolyMap, f: PolyMap) -> PolyMap:
    """``g o f``."""
    if f.target.coords != g.source.coords:
        raise GeometryError(
            f"cannot compose: target {f.target.coords} vs source {g.source.coords}")
    return PolyMap(f.source, g.target, g.apply(f.components))


# ---------------------------------------------------------------------------
# vector fields


@dataclass(frozen=True)
class VectorField:
    chart: Chart
    components: tuple

    def __init__(self, chart: Chart, components: Iterable):
        comps = tuple(lift(c) for c in components)
        if len(comps) != chart.dim:
            raise GeometryError("vector field component count differs from chart dimension")
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_dict(cls, chart: Chart, comps: Mapping) -> "VectorField":
        bad = set(comps) - set(chart.coords)
        if bad:
            raise GeometryError(f"unknown coordinates {sorted(bad)}")
        return cls(chart, [comps.get(c, ZERO) for c in chart.coords])

    @classmethod
    def zero(cls, chart: Chart) -> "VectorField":
        return cls(chart, [ZERO] * chart.dim)

    def as_dict(self) -> dict:
        return {n: c for n, c in zip(self.chart.coords, self.components) if c}

    def __call__(self, f: Scalar) -> Scalar:
        """Directional derivative X(f)."""
        acc = ZERO
        for x, c in zip(self.chart.coords, self.components):
            if c:
                d = f.partial(x)
                if d:
                    acc = acc + c * d
        return acc

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.chart, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.chart, [a - b for a, b in zip(self.components, other.components)])

    def scale(self, f) -> "VectorField":
        f = lift(f)
        return VectorField(self.chart, [f * c for c in self.components])

    def substitute(self, assignment: Mapping) -> "VectorField":
        return VectorField(self.chart, [c.substitute(assignment) for c in self.components])

    def is_zero(self) -> bool:
        return all(not c for c in self.components)

    def __str__(self):
        body = " + ".join(f"({c})*d_{n}" for n, c in zip(self.chart.coords, self.components) if c)
        return body or "0"


def commutator(X: VectorField, Y: VectorField) -> VectorField:
    if X.chart.coords != Y.chart.coords:
        raise GeometryError("vector fields live on different charts")
    return VectorField(X.chart, [X(b) - Y(a) for a, b in zip(X.components, Y.components)])


def pushforward(f: PolyMap, X: VectorField, inverse: PolyMap | None = None,
                section: PolyMap | None = None) -> VectorField:
    """``f_* X`` via a polynomial inverse (or a section of a projection).

    The defining relation ``(f_*X) o f = df(X)`` is verified before returning,
    which rejects non-projectable fields when a section is used.
    """
    g = inverse or section
    if g is None:
        raise GeometryError("pushforward needs an inverse or a section")
    if X.chart.coords != f.source.coords:
        raise GeometryError("vector field not on the source chart")
    J = f.jacobian()
    dfX = [sum((J[i][j] * X.components[j] for j in range(f.source.dim)), ZERO)
           for i in range(f.target.dim)]
    back = dict(zip(f.source.coords, g.components))
    out = VectorField(f.target, [c.substitute(back) for c in dfX])
    forward = dict(zip(f.target.coords, f.components))
    if any(o.substitute(forward) != d for o, d in zip(out.components, dfX)):
        raise GeometryError("vector field is not f-related to any field on the target")
    return out


# ---------------------------------------------------------------------------
# submanifolds


@dataclass(frozen=True)
class SolvedSubmanifold:
    """Subset of an ambient chart cut out by ``dep = expr(free)``."""

    ambient: Chart
    solved: tuple  # ((dep, Scalar in free coords), ...) in ambient order

    def __init__(self, ambient: Chart, solved: Mapping[str, Scalar]):
        solved = {k: lift(v) for k, v in solved.items()}
        bad = set(solved) - set(ambient.coords)
        if bad:
            raise GeometryError(f"solved names outside chart: {sorted(bad)}")
        for dep, expr in solved.items():
            if expr.variables() & set(solved):
                raise GeometryError(f"{dep} = {expr} is not in solved form")
            ambient.check_scalar(expr, allow_param=True)
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "solved",
                           tuple((c, solved[c]) for c in ambient.coords if c in solved))

    @property
    def dependent(self) -> tuple:
        return tuple(c for c, _ in self.solved)

    @property
    def free(self) -> tuple:
        deps = set(self.dependent)
        return tuple(c for c in self.ambient.coords if c not in deps)

    @property
    def chart(self) -> Chart:
        return Chart(self.free)

    def as_dict(self) -> dict:
        return dict(self.solved)

    def restrict(self, f: Scalar) -> Scalar:
        return lift(f).substitute(dict(self.solved))

    def generators(self) -> dict:
        return {c: Scalar.var(c) - e for c, e in self.solved}

    def embedding(self) -> PolyMap:
        """The parametrisation ``free -> ambient``."""
        sol = dict(self.solved)
        return PolyMap(self.chart, self.ambient,
                       [sol.get(c, Scalar.var(c)) for c in self.ambient.coords])

    def __str__(self):
        return "{" + ", ".join(f"{c} = {e}" for c, e in self.solved) + "}"


class SolveError(GeometryError):
    pass


def solve_affine(equations: Iterable[Scalar], unknowns: Sequence[str]) -> dict:
    """Solve polynomial equations ``g = 0`` for some of ``unknowns``.

    Repeatedly picks the first unknown (in the given preference order) that
    occurs in some equation linearly with a nonzero constant coefficient and
    eliminates it.  All remaining equations must reduce to zero.  Returns the
    fully substituted solved form ``{unknown: expression}``.
    """
    eqs = [lift(e) for e in equations]
    eqs = [e for e in eqs if e]
    solved: dict = {}
    order = list(unknowns)
    while eqs:
        pick = None
        for u in order:
            if u in solved:
                continue
            for idx, e in enumerate(eqs):
                if u not in e.variables():
                    continue
                lp = e.linear_part([u])
                if lp is None:
                    continue
                coeffs, rest = lp
                c = coeffs.get(u)
                if c is not None and c.is_constant() and u not in rest.variables():
                    pick = (u, idx, -rest / c.constant_value())
                    break
            if pick:
                break
        if pick is None:
            raise SolveError("equations are not solvable in affine solved form: "
                             + ", ".join(f"{e} = 0" for e in eqs))
        u, idx, expr = pick
        sub = {u: expr}
        solved = {k: v.substitute(sub) for k, v in solved.items()}
        solved[u] = expr
        eqs = [e.substitute(sub) for j, e in enumerate(eqs) if j != idx]
        eqs = [e for e in eqs if e]
    return solved


def tangent_map(f: PolyMap, tag: str = "t") -> PolyMap:
    """The differential ``df: T(source) -> T(target)`` as a polynomial map."""
    from .names import dot

    src = tangent_chart(f.source, tag)
    tgt = tangent_chart(f.target, tag)
    J = f.jacobian()
    dots = [Scalar.var(dot(c, tag)) for c in f.source.coords]
    lin = [sum((J[i][j] * dots[j] for j in range(f.source.dim) if J[i][j]), ZERO)
           for i in range(f.target.dim)]
    return PolyMap(src, tgt, list(f.components) + lin)
