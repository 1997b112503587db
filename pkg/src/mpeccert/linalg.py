"""Exact Gaussian elimination: rank, nullspace, solving, span membership.

All routines work on tuples/lists of mpq rows and never divide by a
quantity that has not been tested against exact zero.
"""

from __future__ import annotations

from typing import Sequence

from .errors import DimensionMismatch
from .rationals import Mat, Vec, ZERO, ONE, mat, vec


def rref(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form; returns (rows, pivot column indices)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        pv = m[r][c]
        if pv != 1:
            inv = 1 / pv
            m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> Mat:
    """Basis of {x : rows @ x = 0} in R^ncols, one tuple per basis vector."""
    if any(len(r) != ncols for r in rows):
        raise DimensionMismatch("nullspace row width")
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [ZERO] * ncols
        v[fc] = ONE
        for prow, pc in zip(red, pivots):
            v[pc] = -prow[fc]
        basis.append(tuple(v))
    return tuple(basis)


def solve(rows: Sequence[Sequence], rhs: Sequence) -> Vec | None:
    """One exact solution of rows @ x = rhs, or None when inconsistent."""
    if len(rows) != len(rhs):
        raise DimensionMismatch("solve rhs length")
    if not rows:
        return ()
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    x = [ZERO] * ncols
    for prow, pc in zip(red, pivots):
        if pc == ncols:
            return None
        x[pc] = prow[ncols]
    return tuple(x)


def in_span(vectors: Sequence[Sequence], target: Sequence) -> Vec | None:
    """Coefficients writing target as a combination of vectors, or None."""
    if not vectors:
        return () if all(t == 0 for t in target) else None
    cols = mat(vectors)
    system = tuple(tuple(v[j] for v in cols) for j in range(len(target)))
    return solve(system, vec(target))
