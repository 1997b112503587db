"""Complementarity checks against hand-solved instances."""

import random

from gmpy2 import mpq

from mpeccert import mpcc
from mpeccert.certificates import PairMultiplier
from mpeccert.cones import polar, member
from mpeccert.instances import Partition, active_sets, enumerate_partitions
from mpeccert.oracle import b_stationary, implication_audit, linearized_branches
from mpeccert.rationals import dot, vec

from cases import (
    biactive_descent_case,
    double_pair_case,
    single_pair_min_first_case,
)


def test_active_sets_biactive_descent():
    act = active_sets(biactive_descent_case())
    assert act.ig == (0, 1)
    assert act.i00 == (0,)
    assert act.i0plus == () and act.iplus0 == ()


def test_active_sets_double_pair():
    act = active_sets(double_pair_case())
    assert act.ig == (0, 1)
    assert act.i00 == (0, 1)


def test_limiting_multiplier_unique():
    inst = biactive_descent_case()
    cert = mpcc.check_m(inst)
    assert cert.verdict
    assert cert.multiplier == PairMultiplier(
        (), vec([1, 3]), vec([0]), vec([-2])
    )
    unique, point, _ = mpcc.m_multiplier_hull(inst)
    assert unique
    assert point == cert.multiplier


def test_strong_fails_on_biactive_descent():
    cert = mpcc.check_s(biactive_descent_case())
    assert not cert.verdict
    assert cert.refutation is not None


def test_directional_fails_both_partitions():
    inst = biactive_descent_case()
    for p in enumerate_partitions((0,)):
        cert = mpcc.check_q(inst, p)
        assert not cert.verdict


def test_limiting_directional_fails():
    cert = mpcc.check_qm(biactive_descent_case())
    assert not cert.verdict


def test_descent_direction_found():
    cert = b_stationary(biactive_descent_case())
    assert not cert.verdict
    u = cert.detail["descent"]
    inst = biactive_descent_case()
    assert dot(inst.f_grad, u) < 0
    # the direction satisfies some branch of the linearized cone
    fam = linearized_branches(inst)
    assert any(b.contains(u) for b in fam.branches)


def test_strong_single_pair():
    inst = single_pair_min_first_case()
    cert = mpcc.check_s(inst)
    assert cert.verdict
    assert cert.multiplier.lam_G == vec([1])
    assert cert.multiplier.lam_H == vec([0])
    assert mpcc.check_licq(inst)


def test_zero_gradient_everything_true():
    inst = double_pair_case([0, 0, 0, 0])
    assert mpcc.check_s(inst).verdict
    assert mpcc.check_m(inst).verdict
    for p in enumerate_partitions((0, 1)):
        assert mpcc.check_q(inst, p).verdict
    assert mpcc.check_qm(inst).verdict
    assert b_stationary(inst).verdict


def test_nonsingular_sets_double_pair():
    inst = double_pair_case()
    beta_g, beta_h, beta_gh = mpcc.nonsingular_sets(inst)
    assert beta_g == (0, 1)
    assert beta_h == (1,)
    assert beta_gh == (1,)


def test_sign_product_qualification_both_partitions():
    inst = double_pair_case()
    for p in (Partition((1,), ()), Partition((), (1,))):
        res = mpcc.qual_sign_products_nonsingular(inst, p)
        assert res.ok


def test_pang_fukushima_fails_both_partitions():
    inst = double_pair_case()
    for p in (Partition((1,), ()), Partition((), (1,))):
        res = mpcc.qual_pang_fukushima(inst, p)
        assert not res.ok
        assert mpcc.violates_sign_products(inst, res.pairs, res.witness)
        assert res.pairs == _a3_pairs(inst, p)


def _a3_pairs(inst, p):
    beta_g, beta_h, _ = mpcc.nonsingular_sets(inst)
    b1, b2 = p.beta1, p.beta2
    pairs = []
    for i in b1:
        for ip in beta_g:
            if ip not in b1:
                pairs.append((("G", i), ("G", ip)))
    for i in b1:
        for ip in beta_h:
            if ip not in b2:
                pairs.append((("G", i), ("H", ip)))
    for i in b2:
        for ip in beta_h:
            if ip not in b2:
                pairs.append((("H", i), ("H", ip)))
    for i in beta_g:
        if i not in b1:
            for ip in b2:
                pairs.append((("G", i), ("H", ip)))
    return tuple(pairs)


def test_known_violator_is_accepted():
    # the kernel equations force lam_H[1] = -lam_g[0]; with both blocks of
    # the comparison condition this vector shows a negative product
    inst = double_pair_case()
    mu = PairMultiplier((), vec([1, 1]), vec([1, -1]), vec([1, -1]))
    assert mpcc.in_kernel(inst, mu)
    for p in (Partition((), (1,)), Partition((1,), ())):
        assert mpcc.violates_sign_products(inst, _a3_pairs(inst, p), mu)
    # flipping the last entry leaves the kernel, so it cannot witness anything
    bad = PairMultiplier((), vec([1, 1]), vec([1, -1]), vec([1, 1]))
    assert not mpcc.in_kernel(inst, bad)
    assert not mpcc.violates_sign_products(inst, _a3_pairs(inst, Partition((), (1,))), bad)


def test_licq_fails_biactive_descent():
    assert not mpcc.check_licq(biactive_descent_case())


def test_licq_fails_on_duplicated_rows():
    from cases import fd
    from mpeccert.instances import MpccInstance

    inst = MpccInstance(
        n=2,
        f_grad=vec([1, 0]),
        h=(),
        g=(fd(0, [1, 1]), fd(0, [1, 1])),
        G=(fd(0, [1, 0]),),
        H=(fd(0, [0, 1]),),
    )
    assert not mpcc.check_licq(inst)


def test_qcc_pair_polar_structure():
    inst = biactive_descent_case()
    pair = mpcc.build_qcc_pair(inst, Partition((0,), ()))
    # layout: lam_g (2) | lam_G (1) | lam_H (1)
    assert pair.q1_polar.contains(vec([1, 1, -5, 2]))  # lam_G free, lam_H >= 0
    assert not pair.q1_polar.contains(vec([1, 1, 0, -1]))
    assert pair.q2_polar.contains(vec([0, 0, 3, -7]))  # lam_G >= 0, lam_H free
    assert not pair.q2_polar.contains(vec([0, 0, -1, 0]))


def test_polar_pair_intersection_matches_regular_cone():
    rng = random.Random(31)
    for seed in range(4):
        from mpeccert.oracle import random_mpcc

        inst = random_mpcc(seed)
        act = active_sets(inst)
        for p in enumerate_partitions(act.i00):
            pair = mpcc.build_qcc_pair(inst, p)
            for _ in range(25):
                lam = vec([rng.randint(-2, 2) for _ in range(pair.q1.dim)])
                joint = pair.q1_polar.contains(lam) and pair.q2_polar.contains(lam)
                mult = mpcc._unpack(mpcc.space(inst), lam)
                assert joint == mpcc.in_regular_normal_cone(inst, mult)
                # the hand-written polar agrees with the generated one
                assert pair.q1_polar.contains(lam) == member(polar(pair.q1), lam).inside


def test_strong_multiplier_image_pairs_nonpositively_with_branches():
    from mpeccert.cones import lineality, relative_interior_point

    inst = single_pair_min_first_case()
    cert = mpcc.check_s(inst)
    image = mpcc.multiplier_image(inst, cert.multiplier)
    rng = random.Random(5)
    fam = linearized_branches(inst)
    checked = 0
    for branch in fam.branches:
        pts = [vec([rng.randint(-3, 3) for _ in range(inst.n)]) for _ in range(60)]
        ri = relative_interior_point(branch.cone)
        lin = lineality(branch.cone)
        for _ in range(60):
            u = list(ri)
            for lv in lin:
                c = rng.randint(-2, 2)
                u = [a + c * b for a, b in zip(u, lv)]
            t = rng.randint(0, 3)
            pts.append(vec([t * a for a in u]))
        for u in pts:
            if branch.contains(u):
                assert dot(image, u) <= 0
                checked += 1
    assert checked > 100


def test_implication_audit_clean_on_examples():
    for inst in (
        biactive_descent_case(),
        double_pair_case(),
        double_pair_case([0, 0, 0, 0]),
        single_pair_min_first_case(),
    ):
        assert implication_audit(inst) == []


def test_certify_runs_and_cross_validates():
    report = mpcc.certify(biactive_descent_case())
    certs = report["certificates"]
    assert not certs["s"].verdict
    assert certs["m"].verdict
    assert not certs["qm"].verdict
    assert not certs["b_oracle"].verdict
    assert all(not c.verdict for c in certs["q"].values())


def test_nonsingular_sets_empty_cases():
    # no biactive pairs: nothing to classify
    inst = single_pair_min_first_case()
    from mpeccert.instances import MpccInstance
    from cases import fd

    no_biactive = MpccInstance(
        n=2,
        f_grad=vec([1, 0]),
        h=(),
        g=(),
        G=(fd(0, [1, 0]),),
        H=(fd(1, [0, 1]),),
    )
    assert mpcc.nonsingular_sets(no_biactive) == ((), (), ())
    # opposed equalities force u = 0 in the relaxed system
    pinned = MpccInstance(
        n=1,
        f_grad=vec([1]),
        h=(fd(0, [1]),),
        g=(),
        G=(fd(0, [1]),),
        H=(fd(0, [1]),),
    )
    assert mpcc.nonsingular_sets(pinned) == ((), (), ())


def test_sign_products_trivial_kernel():
    # independent gradients: the kernel is {0}, the condition is vacuous
    inst = single_pair_min_first_case()
    assert mpcc.check_licq(inst)
    p = Partition((0,), ())
    assert mpcc.qual_sign_products(inst, p).ok
    assert mpcc.qual_pang_fukushima(inst, Partition((0,), ())).ok


def test_engineered_sign_product_violation():
    # duplicate the pair so the kernel contains (lam_G, -lam_G) patterns
    from cases import fd
    from mpeccert.instances import MpccInstance

    inst = MpccInstance(
        n=2,
        f_grad=vec([0, 0]),
        h=(),
        g=(),
        G=(fd(0, [1, 0]), fd(0, [1, 0])),
        H=(fd(0, [0, 1]), fd(0, [0, 1])),
    )
    res = mpcc.qual_sign_products(inst, Partition((0,), (1,)))
    assert not res.ok
    assert mpcc.violates_sign_products(inst, res.pairs, res.witness)


def test_restricted_mode_past_partition_cap():
    from cases import fd
    from mpeccert.errors import BranchLimitExceeded, PartitionLimitExceeded
    from mpeccert.instances import MpccInstance
    import pytest

    # twelve biactive pairs: full enumeration is far past any small cap,
    # but the zero gradient certifies through the first heuristic try
    n = 12
    pairs = tuple(fd(0, [1 if j == i else 0 for j in range(n)]) for i in range(n))
    mates = tuple(fd(0, [2 if j == i else 0 for j in range(n)]) for i in range(n))
    big = MpccInstance(n=n, f_grad=vec([0] * n), h=(), g=(), G=pairs, H=mates)
    cert = mpcc.check_qm(big, cap=64)
    assert cert.verdict
    # a success found inside the budget is sound even under a tiny cap
    dup = MpccInstance(
        n=2,
        f_grad=vec([1, 1]),
        h=(),
        g=(),
        G=(fd(0, [1, 0]), fd(0, [1, 0])),
        H=(fd(0, [0, 1]), fd(0, [0, 1])),
    )
    assert mpcc.check_qm(dup, cap=1).verdict
    # an inconclusive restricted search must raise, never report false
    neg = biactive_descent_case()
    assert not mpcc.check_qm(neg).verdict
    with pytest.raises((BranchLimitExceeded, PartitionLimitExceeded)):
        mpcc.check_qm(neg, cap=1)
