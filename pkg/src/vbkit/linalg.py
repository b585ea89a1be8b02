"""Exact linear algebra over polynomial matrices: determinants, minors, ranks."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .scalar import ONE, ZERO, Scalar


def determinant(m: Sequence[Sequence[Scalar]]) -> Scalar:
    """Laplace expansion memoised over column subsets (fine up to ~10x10)."""
    n = len(m)
    if n == 0:
        return ONE
    memo: dict = {}

    def det(row: int, cols: tuple) -> Scalar:
        if row == n:
            return ONE
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc = ZERO
        for pos, c in enumerate(cols):
            entry = m[row][c]
            if not entry:
                continue
            sub = det(row + 1, cols[:pos] + cols[pos + 1:])
            if sub:
                term = entry * sub
                acc = acc - term if pos % 2 else acc + term
        memo[key] = acc
        return acc

    return det(0, tuple(range(n)))


def minors(m, size: int):
    """Yield ``(rows, cols, determinant)`` for every ``size``-minor."""
    nr = len(m)
    nc = len(m[0]) if m else 0
    for rows in combinations(range(nr), size):
        for cols in combinations(range(nc), size):
            yield rows, cols, determinant([[m[r][c] for c in cols] for r in rows])


def rank_fractions(m) -> int:
    """Rank of a matrix of Fractions by Gaussian elimination."""
    rows = [list(r) for r in m]
    if not rows:
        return 0
    rank = 0
    ncols = len(rows[0])
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col] / p
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def kernel_fractions(m, ncols: int) -> list:
    """Basis of the right kernel of a Fraction matrix."""
    rows = [list(r) for r in m]
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        rows[rank] = [a / p for a in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][free]
        basis.append(v)
    return basis


def evaluate_matrix(m, point: Mapping) -> list:
    return [[x.evaluate(point) for x in row] for row in m]


def matrix_variables(m) -> list:
    names = set()
    for row in m:
        for x in row:
            names |= x.variables()
    return sorted(names)


def sample_points(names: Sequence[str], count: int, rng: random.Random,
                  small_first: bool = True):
    """Rational sample points; small integers (including 0) come first."""
    names = list(names)
    if small_first:
        grid = [-2, -1, 0, 1, 2]
        if len(names) <= 3:
            from itertools import product

            for vals in product(grid, repeat=len(names)):
                yield dict(zip(names, map(Fraction, vals)))
        else:
            yield {n: Fraction(0) for n in names}
    for _ in range(count):
        yield {n: Fraction(rng.randint(-50, 50), rng.randint(1, 7)) for n in names}


@dataclass
class RankCertificate:
    generic_rank: int
    verdict: str  # "constant" | "falsified" | "unfalsified"
    witness: dict | None = None
    witness_rank: int | None = None
    minor: tuple | None = None  # (rows, cols) of a constant nonzero minor

    @property
    def constant(self) -> bool:
        return self.verdict == "constant"


def certify_rank(m, rng: random.Random | None = None, samples: int = 1000) -> RankCertificate:
    """Generic rank of a polynomial matrix and a constancy certificate.

    Constancy is certified exactly when every ``(r+1)``-minor vanishes
    identically and some ``r``-minor is a nonzero constant.  Otherwise the
    matrix is evaluated at sample points and a rank drop is reported with its
    witness.
    """
    rng = rng or random.Random(0)
    nr = len(m)
    nc = len(m[0]) if m else 0
    if nr == 0 or nc == 0:
        return RankCertificate(0, "constant", minor=((), ()))
    names = matrix_variables(m)
    # generic rank: the largest size with a nonzero minor
    r = 0
    top = min(nr, nc)
    for size in range(top, 0, -1):
        if any(d for _, _, d in minors(m, size)):
            r = size
            break
    if r == 0:
        return RankCertificate(0, "constant", minor=((), ()))
    for rows, cols, d in minors(m, r):
        if d and d.is_constant():
            return RankCertificate(r, "constant", minor=(rows, cols))
    for point in sample_points(names, samples, rng):
        k = rank_fractions(evaluate_matrix(m, point))
        if k != r:
            return RankCertificate(r, "falsified", witness=point, witness_rank=k)
    return RankCertificate(r, "unfalsified")
