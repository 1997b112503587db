"""Exact rational scalars and the small vector helpers built on them.

Every number that enters a decision path is a `gmpy2.mpq`: arbitrary
precision, always in lowest terms, positive denominator.  Floats are
rejected at the boundary -- a binary float smuggled into an active-set
test would silently corrupt verdicts that hinge on exact equality.

Vectors are plain tuples of mpq and matrices are tuples of row tuples.
The problems this library sees are tiny (a few dozen rows), so dense
pure-Python containers are both fast enough and easy to audit.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence

from gmpy2 import mpq

from .errors import DimensionMismatch, ParseError

_RAT_RE = re.compile(r"^[+-]?\d+(/[1-9]\d*)?$")

Rat = mpq
Vec = tuple
Mat = tuple

ZERO = mpq(0)
ONE = mpq(1)


def rat(x) -> Rat:
    """Coerce an int, string ("p/q" or "p"), Fraction, or mpq to mpq."""
    if isinstance(x, type(ZERO)):
        return x
    if isinstance(x, bool):
        raise ParseError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        text = x.strip()
        if not _RAT_RE.match(text):
            raise ParseError(f"bad rational literal {x!r} (want 'p/q' or an integer)")
        return mpq(text)
    if isinstance(x, float):
        raise ParseError(f"floats are not accepted, got {x!r}")
    raise ParseError(f"not a rational: {x!r}")


def rat_str(x: Rat) -> str:
    """Render as "p/q", or "p" when the denominator is 1."""
    return str(x)


def vec(xs: Iterable) -> Vec:
    return tuple(rat(x) for x in xs)


def mat(rows: Iterable[Iterable]) -> Mat:
    out = tuple(vec(r) for r in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise DimensionMismatch("ragged matrix")
    return out


def zeros(n: int) -> Vec:
    return (ZERO,) * n


def unit(n: int, i: int) -> Vec:
    return tuple(ONE if j == i else ZERO for j in range(n))


def dot(u: Sequence, v: Sequence) -> Rat:
    if len(u) != len(v):
        raise DimensionMismatch(f"dot of lengths {len(u)} and {len(v)}")
    s = ZERO
    for a, b in zip(u, v):
        s += a * b
    return s


def add(u: Sequence, v: Sequence) -> Vec:
    if len(u) != len(v):
        raise DimensionMismatch("vector add")
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> Vec:
    if len(u) != len(v):
        raise DimensionMismatch("vector sub")
    return tuple(a - b for a, b in zip(u, v))


def neg(u: Sequence) -> Vec:
    return tuple(-a for a in u)


def scale(c: Rat, u: Sequence) -> Vec:
    return tuple(c * a for a in u)


def is_zero(u: Sequence) -> bool:
    return all(a == 0 for a in u)


def matvec(rows: Sequence[Sequence], x: Sequence) -> Vec:
    return tuple(dot(r, x) for r in rows)


def mat_t_vec(rows: Sequence[Sequence], y: Sequence) -> Vec:
    """Transpose-apply: sum_i y_i * rows[i]."""
    if len(rows) != len(y):
        raise DimensionMismatch("transpose apply")
    if not rows:
        return ()
    acc = [ZERO] * len(rows[0])
    for yi, row in zip(y, rows):
        if yi == 0:
            continue
        for j, a in enumerate(row):
            if a != 0:
                acc[j] += yi * a
    return tuple(acc)


def transpose(rows: Sequence[Sequence]) -> Mat:
    if not rows:
        return ()
    return tuple(tuple(r[j] for r in rows) for j in range(len(rows[0])))
