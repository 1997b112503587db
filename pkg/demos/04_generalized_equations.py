#!/usr/bin/env python3
"""Normal-cone generalized equations: multiplier polytopes, critical
cones, subset families, and the complementarity encoding bridge.

The constraint is 0 in G(x, y) + NhatGamma(y) with x in C and Gamma cut
out by inequalities on y.  Non-unique Lagrange multipliers are the
interesting regime: the active set splits into indices some multiplier
makes positive and a degenerate rest, and all directional machinery is
indexed by subsets of that degenerate part.
"""

from gmpy2 import mpq

from mpeccert import GeInstance, GeConstraint, HCone
from mpeccert import ge, mpcc
from mpeccert.instances import enumerate_partitions
from mpeccert.oracle import b_stationary, random_ge
from mpeccert.rationals import rat, vec

print("== a scalar instance: y <= 0, G(x, y) = y - x, free x ==")


def scalar(f_y):
    return GeInstance(
        n=1, m=1,
        f_grad=vec([0, f_y]),
        gx=((rat(-1),),),
        gy=((rat(1),),),
        g_val=vec([0]),
        g=(GeConstraint(rat(0), vec([1]), ((rat(0),),)),),
        tc=HCone.full(1),
        ggcq_asserted=True,
    )


inst = scalar(1)  # minimize y
mp = ge.multiplier_polytope(inst)
print(f"active set {mp.active}, positive part {mp.iplus}, degenerate part {mp.izero}")
lam, how = ge.lambda_bar(inst)
print(f"base multiplier {tuple(map(str, lam))} ({how})")
print(f"strong verdict for min y:  {ge.check_s(inst).verdict}")
print(f"strong verdict for min -y: {ge.check_s(scalar(-1)).verdict}")
print(f"no-descent verdict for min y: {b_stationary(inst).verdict}")
fam = ge.bge_family(inst)
print(f"admissible subsets of the degenerate part: {fam.members}")
for pair in ge.admissible_pairs(inst):
    print(f"  directional at pair {pair}: {ge.check_q(inst, pair).verdict}")
print("note the overlapping full/full pair: its polar intersection is larger")
print("than the regular normal cone, so it can accept points the disjoint")
print("pairs reject.")

print()
print("== non-unique multipliers and the directional argmax ==")
hess_one = ((rat(1), rat(0)), (rat(0), rat(1)))
hess_zero = ((rat(0), rat(0)), (rat(0), rat(0)))
two = GeInstance(
    n=1, m=2,
    f_grad=vec([0, 0, 0]),
    gx=((rat(0),), (rat(0),)),
    gy=((rat(1), rat(0)), (rat(0), rat(1))),
    g_val=vec([-1, 0]),  # multiplier target (1, 0)
    g=(
        GeConstraint(rat(0), vec([1, 0]), hess_one),
        GeConstraint(rat(0), vec([1, 0]), hess_zero),
    ),
    tc=HCone.full(1),
    ggcq_asserted=True,
)
mp = ge.multiplier_polytope(two)
print(f"two copies of the same gradient: the polytope is a segment, "
      f"positive part {mp.iplus}")
dm = ge.directional_multipliers(two, vec([0, 1]))
print(f"curvature argmax along (0,1): value {dm.value}, "
      f"maximizer {tuple(map(str, dm.maximizer))} (all mass on the curved row)")
print(f"constancy support: {ge.constancy_status(two)[0]}")

print()
print("== the complementarity encoding bridge ==")
inst = random_ge(11, mode="s")
enc = ge.to_mpcc(inst)
mp = ge.multiplier_polytope(inst)
print(f"random zero-curvature instance: n={inst.n}, m={inst.m}, "
      f"degenerate part {mp.izero}")
print(f"strong:   native {ge.check_s(inst).verdict}, encoded {mpcc.check_s(enc).verdict}")
for p in enumerate_partitions(mp.izero):
    native = ge.check_q(inst, (p.beta1, p.beta2)).verdict
    encoded = mpcc.check_q(enc, p).verdict
    print(f"directional at {p.beta1}/{p.beta2}: native {native}, encoded {encoded}")
