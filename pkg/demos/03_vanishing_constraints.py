#!/usr/bin/env python3
"""Vanishing-constraint programs: the same concepts, different cones.

The pair block here is H_i(x) >= 0 with G_i(x) H_i(x) <= 0; the biactive
tangent splits into "H-row tight" and "both rows nonpositive" pieces.
Two tiny instances over H = x1, G = x2 at the origin show the full
spread of verdicts, and the exactness qualification is decided twice:
once by bounding linear programs over the sign-restricted kernel and
once through explicit dual direction systems.  The two routes must
agree call by call, and the demo prints the dual witnesses.
"""

from mpeccert import MpvcInstance, FunData, active_sets, enumerate_partitions, Partition
from mpeccert import mpvc
from mpeccert.oracle import b_stationary
from mpeccert.rationals import rat, vec

fd = lambda v, g: FunData(rat(v), vec(g))


def pair_instance(sign):
    return MpvcInstance(
        n=2,
        f_grad=vec([sign, 0]),
        h=(),
        g=(),
        G=(fd(0, [0, 1]),),
        H=(fd(0, [1, 0]),),
        ggcq_asserted=True,
    )


for sign, label in ((1, "min x1"), (-1, "min -x1")):
    inst = pair_instance(sign)
    print(f"== {label} with the pair (H, G) = (x1, x2) at the origin ==")
    s = mpvc.check_s(inst)
    m = mpvc.check_m(inst)
    qm = mpvc.check_qm(inst)
    b = b_stationary(inst)
    print(f"strong {s.verdict}, limiting {m.verdict}, "
          f"directional-limiting {qm.verdict}, no-descent {b.verdict}")
    if m.verdict:
        lam = m.multiplier
        print(f"limiting multiplier: lam_H = {tuple(map(str, lam.lam_H))}, "
              f"lam_G = {tuple(map(str, lam.lam_G))}")
    for p in enumerate_partitions(active_sets(inst).i00):
        print(f"  directional at beta1={p.beta1}: {mpvc.check_q(inst, p).verdict}")
    print()

print("== the exactness qualification, two independent routes ==")
inst = pair_instance(1)
res = mpvc.qual_exactness(inst, Partition((), (0,)))
print(f"holds for the empty/full split: {res.ok}")
z = res.witnesses["second_block"]
print(f"dual witness direction: {tuple(map(str, z))} "
      "(a direction killing the H-row while strictly decreasing the G-row)")

print()
print("== a failure case: duplicated pair gradients ==")
dup = MpvcInstance(
    n=2,
    f_grad=vec([1, 0]),
    h=(),
    g=(),
    G=(fd(0, [0, 1]), fd(0, [0, 1])),
    H=(fd(0, [1, 0]), fd(0, [1, 0])),
    ggcq_asserted=True,
)
res = mpvc.qual_exactness(dup, Partition((0, 1), ()))
print(f"qualification with both pairs in the first block: {res.ok}")
v = res.violator
print(f"violating kernel element: lam_H = {tuple(map(str, v.lam_H))}, "
      f"lam_G = {tuple(map(str, v.lam_G))}")
print("its first-block lam_H entry is negative, so the implication the")
print("qualification demands cannot hold on this kernel.")
