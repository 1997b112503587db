#!/usr/bin/env python3
"""Stationarity concepts on a complementarity-constrained program.

The running instance is a three-variable program

    min  x1 + x2 - 2 x3
    s.t. -x1 - x3 <= 0,
         -x2 + x3 <= 0,
         0 <= x1  complementary to  x2 >= 0,

at the origin.  The point admits a limiting-cone multiplier (so the
usual "M-stationarity" certificate fires), yet a feasible descent
direction exists.  The directional concepts detect this: they fail for
every partition of the biactive set, which is exactly the gap the
two-multiplier test is designed to expose.
"""

from mpeccert import MpccInstance, FunData, active_sets, enumerate_partitions
from mpeccert import mpcc
from mpeccert.oracle import b_stationary
from mpeccert.rationals import rat, vec

fd = lambda v, g: FunData(rat(v), vec(g))

inst = MpccInstance(
    n=3,
    f_grad=vec([1, 1, -2]),
    h=(),
    g=(fd(0, [-1, 0, -1]), fd(0, [0, -1, 1])),
    G=(fd(0, [1, 0, 0]),),
    H=(fd(0, [0, 1, 0]),),
    ggcq_asserted=True,  # all constraint data is affine
)

act = active_sets(inst)
print(f"active inequalities: {act.ig}; biactive pairs: {act.i00}")

print()
print("== the limiting (M-) multiplier exists and is unique ==")
m = mpcc.check_m(inst)
print(f"verdict: {m.verdict}")
lam = m.multiplier
print(f"multiplier: lam_g = {tuple(map(str, lam.lam_g))}, "
      f"lam_G = {tuple(map(str, lam.lam_G))}, lam_H = {tuple(map(str, lam.lam_H))}")
unique, point, box = mpcc.m_multiplier_hull(inst)
print(f"coordinatewise min/max collapse to a single point: {unique}")

print()
print("== but the point is not strongly stationary ==")
s = mpcc.check_s(inst)
print(f"strong verdict: {s.verdict} (the pair multiplier would need lam_H >= 0)")

print()
print("== directional tests fail for every partition ==")
for p in enumerate_partitions(act.i00):
    q = mpcc.check_q(inst, p)
    print(f"partition beta1={p.beta1} beta2={p.beta2}: directional = {q.verdict}")
qm = mpcc.check_qm(inst)
print(f"directional-limiting verdict: {qm.verdict} "
      f"(after trying {qm.detail['partitions_tried']} partitions)")

print()
print("== the brute-force oracle produces the actual descent direction ==")
b = b_stationary(inst)
u = b.detail["descent"]
print(f"no-descent verdict: {b.verdict}")
print(f"descent direction: {tuple(map(str, u))}, objective slope "
      f"{sum(a * b for a, b in zip(inst.f_grad, u))}")

print()
print("== qualifications ==")
print(f"all active gradients independent: {mpcc.check_licq(inst)}")
beta_g, beta_h, beta_gh = mpcc.nonsingular_sets(inst)
print(f"nonsingular biactive rows: G-side {beta_g}, H-side {beta_h}, both {beta_gh}")
for p in enumerate_partitions(act.i00):
    res = mpcc.qual_sign_products(inst, p)
    print(f"sign-product qualification at beta1={p.beta1}: {res.ok}"
          + ("" if res.ok else "  (witness kernel element found)"))
print()
print("summary: limiting stationarity alone would pass this point;")
print("the directional layer and the oracle both reject it.")
