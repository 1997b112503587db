#!/usr/bin/env python3
"""A tour of the exact kernel: rational LPs with certificates, and the
polyhedral cone calculus built on top of them.

Everything here is decided in exact rational arithmetic.  No verdict in
this library is ever a float comparison: an optimal point satisfies its
constraints exactly, an infeasibility claim carries a Farkas vector you
can re-check by hand, and a cone membership failure carries a
separating vector.
"""

from gmpy2 import mpq

from mpeccert import HCone, LinearSystem, solve_lp, strict_feasible
from mpeccert.cones import member, polar, polar_gen, lineality, relative_interior_point
from mpeccert.lp import find_feasible, verify_farkas
from mpeccert.rationals import dot, vec

print("== exact linear programming ==")

# minimize -3/4 x1 + 150 x2 - 1/50 x3 + 6 x4 over a degenerate region
ub = LinearSystem.of(
    [
        [mpq(1, 4), -8, -1, 9],
        [mpq(1, 2), -12, mpq(-1, 2), 3],
        [0, 0, 1, 0],
        [-1, 0, 0, 0],
        [0, -1, 0, 0],
        [0, 0, -1, 0],
        [0, 0, 0, -1],
    ],
    [0, 0, 1, 0, 0, 0, 0],
)
res = solve_lp([mpq(-3, 4), 150, mpq(-1, 50), 6], LinearSystem.empty(), ub)
print(f"status: {res.status}")
print(f"point:  {tuple(map(str, res.point))}")
print(f"value:  {res.value}  (an exact rational, not an approximation)")
print(f"duals re-verified: value equals b . y = {dot(ub.b, res.dual_ub)}")

print()
print("== infeasibility comes with a Farkas certificate ==")
eq = LinearSystem.of([[1, 1]], [2])
bad = LinearSystem.of([[1, 0], [0, 1]], [0, 0])
res = find_feasible(eq, bad)
print(f"status: {res.status}")
print(f"certificate rows (eq, ub): {tuple(map(str, res.farkas.y_eq))}, "
      f"{tuple(map(str, res.farkas.y_ub))}")
print(f"re-verification: {verify_farkas(eq, bad, res.farkas)}")

print()
print("== strict feasibility via one shared slack ==")
rows = LinearSystem.of([[1], [-1]], [0, 0])  # x <= 0 and -x <= 0
r = strict_feasible(LinearSystem.empty(), rows, strict=[0])
print(f"can x <= 0 hold strictly while -x <= 0 holds?  {r.ok}")
print(f"refutation multipliers: {tuple(map(str, r.refutation.y_ub))} "
      "(they sum the two rows to 0 = 0, pinning the strict row)")

print()
print("== polar cones, directly in generator form ==")
orthant = HCone.of([], [[1, 0], [0, 1]], 2)   # u <= 0 componentwise
dual = polar(orthant)
print(f"polar rays of the nonpositive orthant: {[tuple(map(str, r)) for r in dual.rays]}")
m = member(dual, vec([2, 3]))
print(f"(2, 3) in the polar: {m.inside}, coefficients {tuple(map(str, m.ray_coeffs))}")
m = member(dual, vec([-1, 0]))
print(f"(-1, 0) in the polar: {m.inside}, separator {tuple(map(str, m.separator))}")

back = polar_gen(dual)
print(f"double polar returns the orthant: contains (-1,-2)? {back.contains(vec([-1, -2]))}; "
      f"contains (1,0)? {back.contains(vec([1, 0]))}")

print()
print("== lineality and relative interior ==")
wedge = HCone.of([], [[1, 0], [-1, 0]], 2)  # the line u1 = 0, written badly
print(f"lineality basis: {[tuple(map(str, b)) for b in lineality(wedge)]}")
print(f"a relative interior point: {tuple(map(str, relative_interior_point(wedge)))} "
      "(the two opposed rows are detected as implicit equalities)")
