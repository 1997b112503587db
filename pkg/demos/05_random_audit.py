#!/usr/bin/env python3
"""Seeded random sweeps auditing the implication order between concepts.

The expected order is

    strong  =>  no-descent  =>  directional (every partition)
                                and directional-limiting
    directional-limiting  =>  limiting

plus the conditional promotions (gradient independence or a sign-product
qualification upgrade a directional verdict to a strong one).  The audit
evaluates every concept on each instance and reports any violated edge;
a nonempty report would mean a defect in the library, never a property
of the instance.
"""

import time

from mpeccert import mpcc, mpvc
from mpeccert.oracle import (
    b_stationary,
    implication_audit,
    random_mpcc,
    random_mpvc,
)

N = 60
start = time.monotonic()
tallies = {"b": 0, "s": 0, "m": 0, "qm": 0}
for seed in range(N):
    mode = ("random", "s", "m")[seed % 3]
    inst = random_mpcc(seed, mode=mode)
    violations = implication_audit(inst)
    assert violations == [], violations
    tallies["b"] += bool(b_stationary(inst).verdict)
    tallies["s"] += bool(mpcc.check_s(inst).verdict)
    tallies["m"] += bool(mpcc.check_m(inst).verdict)
    tallies["qm"] += bool(mpcc.check_qm(inst).verdict)
elapsed = time.monotonic() - start
print(f"complementarity sweep: {N} instances, zero violated edges ({elapsed:.1f}s)")
print(f"  verdict counts: no-descent {tallies['b']}, strong {tallies['s']}, "
      f"limiting {tallies['m']}, directional-limiting {tallies['qm']}")

start = time.monotonic()
tallies = {"b": 0, "s": 0, "m": 0, "qm": 0}
for seed in range(N):
    mode = ("random", "s", "m")[seed % 3]
    inst = random_mpvc(seed, mode=mode)
    violations = implication_audit(inst)
    assert violations == [], violations
    tallies["b"] += bool(b_stationary(inst).verdict)
    tallies["s"] += bool(mpvc.check_s(inst).verdict)
    tallies["m"] += bool(mpvc.check_m(inst).verdict)
    tallies["qm"] += bool(mpvc.check_qm(inst).verdict)
elapsed = time.monotonic() - start
print(f"vanishing-constraint sweep: {N} instances, zero violated edges ({elapsed:.1f}s)")
print(f"  verdict counts: no-descent {tallies['b']}, strong {tallies['s']}, "
      f"limiting {tallies['m']}, directional-limiting {tallies['qm']}")

print()
print("every verdict above was certified: multipliers re-verified exactly,")
print("refutations re-verified exactly, and the two-route checks agreed.")
