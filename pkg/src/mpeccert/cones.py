"""Polyhedral cones in halfspace and generator form, with exact calculus.

`HCone` is {u : E u = 0, B u <= 0}; `GCone` is the set of nonnegative
combinations of `rays` plus arbitrary combinations of `lin`.  The two
polars are both explicit Farkas constructions, so no double-description
conversion is ever needed:

* polar {u : Eu = 0, Bu <= 0}  =  {B^T y + E^T z : y >= 0}
* polar cone(rays, lin)        =  {u : rays.u <= 0, lin.u = 0}

Generator-form membership is one feasibility LP; a failed membership
comes with a separating vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionMismatch, InternalError
from .lp import LinearSystem, find_feasible, strict_feasible
from .rationals import Mat, Vec, ZERO, ONE, dot, mat, vec, zeros
from . import linalg


@dataclass(frozen=True)
class HCone:
    """{u : eq u = 0, ineq u <= 0} in R^dim."""

    eq: Mat
    ineq: Mat
    dim: int

    def __post_init__(self):
        for row in self.eq + self.ineq:
            if len(row) != self.dim:
                raise DimensionMismatch("HCone row width != ambient dim")

    @staticmethod
    def of(eq, ineq, dim: int) -> "HCone":
        return HCone(mat(eq), mat(ineq), dim)

    @staticmethod
    def full(dim: int) -> "HCone":
        return HCone((), (), dim)

    def contains(self, x: Sequence) -> bool:
        if len(x) != self.dim:
            raise DimensionMismatch("point dim mismatch")
        return all(dot(r, x) == 0 for r in self.eq) and all(
            dot(r, x) <= 0 for r in self.ineq
        )

    def as_system(self) -> tuple[LinearSystem, LinearSystem]:
        ne, ni = len(self.eq), len(self.ineq)
        return (
            LinearSystem(self.eq, zeros(ne)),
            LinearSystem(self.ineq, zeros(ni)),
        )


@dataclass(frozen=True)
class GCone:
    """{sum y_i rays_i + sum z_j lin_j : y >= 0, z free} in R^dim."""

    rays: Mat
    lin: Mat
    dim: int

    def __post_init__(self):
        for row in self.rays + self.lin:
            if len(row) != self.dim:
                raise DimensionMismatch("GCone generator width != ambient dim")

    @staticmethod
    def of(rays, lin, dim: int) -> "GCone":
        return GCone(mat(rays), mat(lin), dim)

    @staticmethod
    def zero(dim: int) -> "GCone":
        return GCone((), (), dim)

    def point(self, ray_coeffs: Sequence, lin_coeffs: Sequence) -> Vec:
        x = [ZERO] * self.dim
        for cf, g in zip(ray_coeffs, self.rays):
            for j, a in enumerate(g):
                x[j] += cf * a
        for cf, g in zip(lin_coeffs, self.lin):
            for j, a in enumerate(g):
                x[j] += cf * a
        return tuple(x)


@dataclass(frozen=True)
class Membership:
    inside: bool
    ray_coeffs: Vec | None = None
    lin_coeffs: Vec | None = None
    separator: Vec | None = None


def polar(cone: HCone) -> GCone:
    """Polar of a halfspace cone, directly in generator form."""
    return GCone(cone.ineq, cone.eq, cone.dim)


def polar_gen(cone: GCone) -> HCone:
    """Polar of a generator cone, directly in halfspace form."""
    return HCone(cone.lin, cone.rays, cone.dim)


def member(cone: GCone, x: Sequence) -> Membership:
    """Exact membership in a generator cone, with coefficients or separator."""
    xv = vec(x)
    if len(xv) != cone.dim:
        raise DimensionMismatch("membership point dim mismatch")
    nr, nl = len(cone.rays), len(cone.lin)
    if nr + nl == 0:
        if all(a == 0 for a in xv):
            return Membership(True, (), ())
        # any coordinate with x_j != 0 separates after sign flip
        sep = tuple(a for a in xv)
        return Membership(False, separator=sep)

    # columns are generators: [rays | lin] coeffs = x, ray coeffs >= 0
    rows = tuple(
        tuple(g[j] for g in cone.rays) + tuple(g[j] for g in cone.lin)
        for j in range(cone.dim)
    )
    eq = LinearSystem(rows, xv)
    sign_rows = tuple(
        tuple(-ONE if k == i else ZERO for k in range(nr + nl)) for i in range(nr)
    )
    ub = LinearSystem(sign_rows, zeros(nr))
    res = find_feasible(eq, ub)
    if res.optimal:
        coeffs = res.point
        if cone.point(coeffs[:nr], coeffs[nr:]) != xv:
            raise InternalError("membership coefficients fail to reproduce the point")
        if any(cf < 0 for cf in coeffs[:nr]):
            raise InternalError("negative coefficient on a ray generator")
        return Membership(True, coeffs[:nr], coeffs[nr:])
    h = tuple(-p for p in res.farkas.y_eq)
    if not separates(cone, xv, h):
        raise InternalError("separator failed re-verification")
    return Membership(False, separator=h)


def separates(cone: GCone, x: Sequence, h: Sequence) -> bool:
    """h is a valid witness that x is outside the generator cone."""
    return (
        dot(h, x) > 0
        and all(dot(h, g) <= 0 for g in cone.rays)
        and all(dot(h, g) == 0 for g in cone.lin)
    )


def image(a_rows: Mat, cone: GCone) -> GCone:
    """{A x : x in cone}: a generator cone maps by mapping its generators."""
    from .rationals import matvec

    rays = tuple(matvec(a_rows, g) for g in cone.rays)
    lin = tuple(matvec(a_rows, g) for g in cone.lin)
    return GCone(rays, lin, len(a_rows))


def lineality(cone: HCone) -> Mat:
    """Basis of the largest linear subspace contained in the cone."""
    return linalg.nullspace(cone.eq + cone.ineq, cone.dim)


def implicit_rows(cone: HCone) -> tuple[int, ...]:
    """Inequality rows that hold with equality on the whole cone."""
    eq, ub = cone.as_system()
    out = []
    for i in range(len(cone.ineq)):
        if not strict_feasible(eq, ub, (i,)).ok:
            out.append(i)
    return tuple(out)


def relative_interior_point(cone: HCone) -> Vec:
    """A point of ri(cone): implicit rows tight, all other rows strict."""
    if not cone.eq and not cone.ineq:
        return zeros(cone.dim)
    imp = set(implicit_rows(cone))
    eq_rows = cone.eq + tuple(cone.ineq[i] for i in sorted(imp))
    rest = [i for i in range(len(cone.ineq)) if i not in imp]
    eq = LinearSystem(eq_rows, zeros(len(eq_rows)))
    ub = LinearSystem(tuple(cone.ineq[i] for i in rest), zeros(len(rest)))
    res = strict_feasible(eq, ub, tuple(range(len(rest))))
    if not res.ok:
        raise InternalError("a nonempty halfspace cone has a relative interior point")
    return res.witness


def span_basis(cone: HCone) -> Mat:
    """Basis of span(cone) = {u : eq u = 0, (implicit ineq) u = 0}."""
    rows = cone.eq + tuple(cone.ineq[i] for i in implicit_rows(cone))
    return linalg.nullspace(rows, cone.dim)
