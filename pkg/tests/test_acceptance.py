"""Acceptance suite: golden instances, implication sweeps, kernel identities.

Every check is exact (zero tolerance); the only numeric bounds are the
wall-clock budgets.  Run with `pytest tests/test_acceptance.py -v -s`
to see one summary line per criterion.
"""

import random
import time

from gmpy2 import mpq

from mpeccert import ge, mpcc, mpvc
from mpeccert.certificates import PairMultiplier
from mpeccert.instances import Partition, active_sets, enumerate_partitions
from mpeccert.oracle import (
    b_stationary,
    implication_audit,
    random_ge,
    random_mpcc,
    random_mpvc,
)
from mpeccert.rationals import dot, vec

import helpers
from cases import biactive_descent_case, double_pair_case
from test_oracle import _in_linearized_mpcc


def _report(line):
    print(f"\n[acceptance] {line}")


def test_criterion_1_biactive_descent_golden():
    start = time.monotonic()
    inst = biactive_descent_case()

    m_cert = mpcc.check_m(inst)
    assert m_cert.verdict
    expected = PairMultiplier((), vec([1, 3]), vec([0]), vec([-2]))
    assert m_cert.multiplier == expected

    unique, point, _ = mpcc.m_multiplier_hull(inst)
    assert unique and point == expected

    for p in enumerate_partitions((0,)):
        assert not mpcc.check_qm(inst, p=p).verdict
    assert not mpcc.check_qm(inst).verdict
    assert not mpcc.check_s(inst).verdict

    b_cert = b_stationary(inst)
    assert not b_cert.verdict
    u = b_cert.detail["descent"]
    assert dot(inst.f_grad, u) < 0 and _in_linearized_mpcc(inst, u)

    elapsed = time.monotonic() - start
    assert elapsed < 1.0
    _report(
        f"criterion 1 PASS: unique limiting multiplier {tuple(map(str, (1,3,0,-2)))}, "
        f"stronger concepts refuted, descent verified ({elapsed:.3f}s)"
    )


def test_criterion_2_double_pair_golden():
    start = time.monotonic()
    inst = double_pair_case()

    beta_g, beta_h, beta_gh = mpcc.nonsingular_sets(inst)
    assert beta_g == (0, 1)
    assert beta_h == (1,)
    assert beta_gh == (1,)

    partitions = (Partition((1,), ()), Partition((), (1,)))
    for p in partitions:
        assert mpcc.qual_sign_products_nonsingular(inst, p).ok

    # the comparison condition fails both ways; the violator is a kernel
    # element (the kernel equations force lam_H[1] = -lam_g[0], so the
    # published vector carries a sign slip in its last entry)
    violator = PairMultiplier((), vec([1, 1]), vec([1, -1]), vec([1, -1]))
    assert mpcc.in_kernel(inst, violator)
    for p in partitions:
        res = mpcc.qual_pang_fukushima(inst, p)
        assert not res.ok
        assert mpcc.violates_sign_products(inst, res.pairs, violator)
        assert mpcc.violates_sign_products(inst, res.pairs, res.witness)

    elapsed = time.monotonic() - start
    assert elapsed < 1.0
    _report(
        "criterion 2 PASS: nonsingular sets (0,1)/(1,)/(1,), reduced sign-product "
        f"qualification holds, comparison condition refuted with witness ({elapsed:.3f}s)"
    )


def test_criterion_3_mpcc_implication_sweep():
    start = time.monotonic()
    n_instances = 210
    b_true = s_true = qm_true = 0
    for seed in range(n_instances):
        mode = ("random", "s", "m")[seed % 3]
        inst = random_mpcc(seed, mode=mode)
        assert implication_audit(inst) == []
        if b_stationary(inst).verdict:
            b_true += 1
        if mpcc.check_s(inst).verdict:
            s_true += 1
        if mpcc.check_qm(inst).verdict:
            qm_true += 1
    elapsed = time.monotonic() - start
    assert elapsed < 60.0
    assert b_true >= 30 and s_true >= 30  # the promotion edges were exercised
    _report(
        f"criterion 3 PASS: {n_instances} instances, 0 violated edges "
        f"(no-descent true on {b_true}, strong on {s_true}, "
        f"directional-limiting on {qm_true}) in {elapsed:.1f}s"
    )


def test_criterion_4_mpvc_sweep_with_dual_cross_check():
    start = time.monotonic()
    n_instances = 210
    pair_checks = 0
    b_true = 0
    for seed in range(n_instances):
        mode = ("random", "s", "m")[seed % 3]
        inst = random_mpvc(seed, mode=mode)
        assert implication_audit(inst) == []
        act = active_sets(inst)
        full = Partition(tuple(act.i00), ())
        b = b_stationary(inst).verdict
        b_true += bool(b)
        q_full = mpvc.check_q(inst, full).verdict
        qm = mpvc.check_qm(inst).verdict
        if b:
            assert q_full and qm
        if q_full:
            assert qm
        # primal/dual agreement is asserted inside each call; count them
        for p in enumerate_partitions(act.i00):
            mpvc.qual_exactness(inst, p)
            pair_checks += 1
    elapsed = time.monotonic() - start
    assert elapsed < 60.0
    assert b_true >= 30
    _report(
        f"criterion 4 PASS: {n_instances} instances, chain and promotion clean, "
        f"{pair_checks} primal/dual qualification pairs agreed in {elapsed:.1f}s"
    )


def test_criterion_5_polyhedral_kernel_identities():
    start = time.monotonic()
    rng = random.Random(20240)
    suites = {
        "double polar": helpers.check_double_polar(rng, n_cones=50, pts_per_cone=16),
        "image intersection": helpers.check_image_intersection_identity(rng, 40, 5),
        "preimage polar": helpers.check_preimage_polar_identity(rng, 45, 14),
        "product union": helpers.check_product_union_polar_rule(rng, 32, 18),
    }
    for name, (pts, cones) in suites.items():
        assert pts >= 500, (name, pts)
        assert cones >= 50, (name, cones)
    elapsed = time.monotonic() - start
    total = sum(p for p, _ in suites.values())
    _report(
        f"criterion 5 PASS: {total} sampled points, every identity on >= 500 "
        f"points across >= 50 cones, exact, in {elapsed:.1f}s"
    )


def test_criterion_6_ge_cross_encoding():
    start = time.monotonic()
    n_instances = 55
    q_comparisons = 0
    disagreements = 0
    for seed in range(n_instances):
        mode = ("random", "s")[seed % 2]
        inst = random_ge(seed, mode=mode)
        enc = ge.to_mpcc(inst)
        mp = ge.multiplier_polytope(inst)
        if ge.check_s(inst).verdict != mpcc.check_s(enc).verdict:
            disagreements += 1
        for p in enumerate_partitions(mp.izero):
            # both implementation routes agree inside check_q or it raises
            ge_v = ge.check_q(inst, (p.beta1, p.beta2)).verdict
            cc_v = mpcc.check_q(enc, p).verdict
            disagreements += ge_v != cc_v
            q_comparisons += 1
    assert disagreements == 0
    elapsed = time.monotonic() - start
    _report(
        f"criterion 6 PASS: {n_instances} encodings, strong verdicts equal, "
        f"{q_comparisons} pairwise directional comparisons equal, "
        f"both internal routes agreed on every call in {elapsed:.1f}s"
    )


def test_criterion_7_ge_structural():
    start = time.monotonic()
    rng = random.Random(777)
    n_instances = 12
    samples = 0
    for seed in range(n_instances):
        inst = random_ge(seed)
        # constructing the polytope re-verifies the degenerate-support
        # property and raises on failure
        mp = ge.multiplier_polytope(inst)
        fam = ge.bge_family(inst)
        assert () in fam.members
        assert tuple(mp.izero) in fam.members
        samples += helpers.check_ge_tangent_cover(inst, rng, 100)
    elapsed = time.monotonic() - start
    _report(
        f"criterion 7 PASS: {n_instances} instances, support property and subset "
        f"family verified, {samples} tangent-cover samples in {elapsed:.1f}s"
    )
