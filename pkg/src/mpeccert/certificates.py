"""Verdict containers shared by the mpcc, mpvc, and ge checkers.

A certificate never asserts a bare boolean: a true verdict carries the
multiplier(s) that re-verify the defining system, a false verdict
carries refutation data (a Farkas vector, a separating vector, or one
refutation per enumerated branch).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .instances import Partition
from .rationals import Vec


@dataclass(frozen=True)
class PairMultiplier:
    """Multiplier blocks for the pairwise-constrained problem classes."""

    lam_h: Vec
    lam_g: Vec
    lam_G: Vec
    lam_H: Vec


@dataclass(frozen=True)
class GeMultiplier:
    """(eta_C, q*, q) blocks for the generalized-equation class."""

    eta_c: Vec
    qstar: Vec
    q: Vec


@dataclass(frozen=True)
class Certificate:
    concept: str
    verdict: bool | None  # None when the check is unavailable by contract
    partition: Partition | None = None
    multiplier: object | None = None
    multiplier2: object | None = None  # the second multiplier where one is involved
    refutation: object | None = None
    assumptions: tuple = ()
    detail: dict = field(default_factory=dict)
