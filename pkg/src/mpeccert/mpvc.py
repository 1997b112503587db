"""Stationarity certification for vanishing-constraint programs.

The pair block is embedded as (-H_i, G_i), so a multiplier maps to

    sum lam_h_i grad h_i + sum lam_g_i grad g_i
    + sum (lam_G_i grad G_i - lam_H_i grad H_i).

Sign conventions around the pair block are the main hazard here, so
multipliers are always handled through named blocks and every verdict
is re-verified against the defining inequalities before it is returned.

The biactive tangent piece splits into {H-row tight} and {both rows
nonpositive}; its regular normal cone forces lam_G to vanish, while the
limiting cone allows lam_G >= 0 against a vanishing lam_H.  The
exactness qualification is decided twice, by bounding one linear
program per first-block index and by solving the corresponding dual
systems, and the two routes are required to agree call by call.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .certificates import Certificate, PairMultiplier
from .cones import GCone, member
from .errors import BranchLimitExceeded, InternalError, PartitionLimitExceeded
from .instances import (
    DEFAULT_CAP,
    MpvcInstance,
    Partition,
    active_sets,
    enumerate_partitions,
)
from .lp import LinearSystem, find_feasible, solve_lp
from .rationals import ZERO, ONE, Vec, dot, vec, zeros


@dataclass(frozen=True)
class _Space:
    inst: MpvcInstance
    act: object
    off_h: int
    off_g: int
    off_G: int
    off_H: int
    total: int
    t_rows: tuple
    neg_f: Vec
    h_support: tuple  # indices where lam_H may be nonzero
    g_support: tuple  # indices where lam_G may be nonzero


@lru_cache(maxsize=256)
def space(inst: MpvcInstance) -> _Space:
    act = active_sets(inst)
    m_e, m_i, m_v = len(inst.h), len(inst.g), len(inst.G)
    off_h, off_g = 0, m_e
    off_cg, off_ch = m_e + m_i, m_e + m_i + m_v
    total = m_e + m_i + 2 * m_v
    t_rows = []
    for j in range(inst.n):
        row = [ZERO] * total
        for i, fd in enumerate(inst.h):
            row[off_h + i] = fd.grad[j]
        for i, fd in enumerate(inst.g):
            row[off_g + i] = fd.grad[j]
        for i, fd in enumerate(inst.G):
            row[off_cg + i] = fd.grad[j]
        for i, fd in enumerate(inst.H):
            row[off_ch + i] = -fd.grad[j]
        t_rows.append(tuple(row))
    h_support = tuple(sorted(set(act.i0minus) | set(act.i00) | set(act.i0plus)))
    g_support = tuple(sorted(set(act.iplus0) | set(act.i00)))
    return _Space(
        inst,
        act,
        off_h,
        off_g,
        off_cg,
        off_ch,
        total,
        tuple(t_rows),
        tuple(-a for a in inst.f_grad),
        h_support,
        g_support,
    )


def _unit(width: int, j: int, coeff=ONE) -> Vec:
    row = [ZERO] * width
    row[j] = coeff
    return tuple(row)


def _support_eq_rows(sp: _Space, width: int, off: int):
    rows = []
    for i in range(len(sp.inst.g)):
        if i not in sp.act.ig:
            rows.append(_unit(width, off + sp.off_g + i))
    for i in range(len(sp.inst.H)):
        if i not in sp.h_support:
            rows.append(_unit(width, off + sp.off_H + i))
        if i not in sp.g_support:
            rows.append(_unit(width, off + sp.off_G + i))
    return rows


def _image_eq(sp: _Space, width: int, off: int, rhs):
    rows = tuple(
        (ZERO,) * off + tuple(r) + (ZERO,) * (width - off - sp.total) for r in sp.t_rows
    )
    return list(rows), list(rhs)


def _unpack(sp: _Space, arr) -> PairMultiplier:
    m_e, m_i, m_v = len(sp.inst.h), len(sp.inst.g), len(sp.inst.G)
    return PairMultiplier(
        tuple(arr[sp.off_h : sp.off_h + m_e]),
        tuple(arr[sp.off_g : sp.off_g + m_i]),
        tuple(arr[sp.off_G : sp.off_G + m_v]),
        tuple(arr[sp.off_H : sp.off_H + m_v]),
    )


def _pack(sp: _Space, mult: PairMultiplier) -> Vec:
    return tuple(mult.lam_h) + tuple(mult.lam_g) + tuple(mult.lam_G) + tuple(mult.lam_H)


def multiplier_image(inst: MpvcInstance, mult: PairMultiplier) -> Vec:
    sp = space(inst)
    arr = _pack(sp, mult)
    return tuple(dot(row, arr) for row in sp.t_rows)


def _assumptions(inst) -> tuple:
    return (
        "GGCQ asserted" if inst.ggcq_asserted else "GGCQ assumed (not verifiable from point data)",
    )


def in_regular_normal_cone(inst: MpvcInstance, mult: PairMultiplier) -> bool:
    sp = space(inst)
    act = sp.act
    for i, v in enumerate(mult.lam_g):
        if (i in act.ig and v < 0) or (i not in act.ig and v != 0):
            return False
    for i in range(len(inst.G)):
        lg, lh = mult.lam_G[i], mult.lam_H[i]
        if i not in sp.h_support and lh != 0:
            return False
        if i not in sp.g_support and lg != 0:
            return False
        if i in act.i0minus and lh < 0:
            return False
        if i in act.iplus0 and lg < 0:
            return False
        if i in act.i00 and (lh < 0 or lg != 0):
            return False
    return True


def in_limiting_normal_cone(inst: MpvcInstance, mult: PairMultiplier) -> bool:
    sp = space(inst)
    act = sp.act
    for i, v in enumerate(mult.lam_g):
        if (i in act.ig and v < 0) or (i not in act.ig and v != 0):
            return False
    for i in range(len(inst.G)):
        lg, lh = mult.lam_G[i], mult.lam_H[i]
        if i not in sp.h_support and lh != 0:
            return False
        if i not in sp.g_support and lg != 0:
            return False
        if i in act.i0minus and lh < 0:
            return False
        if i in act.iplus0 and lg < 0:
            return False
        if i in act.i00 and (lg < 0 or lh * lg != 0):
            return False
    return True


def check_s(inst: MpvcInstance) -> Certificate:
    sp = space(inst)
    w = sp.total
    eq_rows, eq_rhs = _image_eq(sp, w, 0, sp.neg_f)
    sup = _support_eq_rows(sp, w, 0)
    eq_rows += sup
    eq_rhs += [ZERO] * len(sup)
    eq_rows += [_unit(w, sp.off_G + i) for i in sp.act.i00]
    eq_rhs += [ZERO] * len(sp.act.i00)
    ineq = [_unit(w, sp.off_g + i, -ONE) for i in sp.act.ig]
    ineq += [_unit(w, sp.off_H + i, -ONE) for i in sp.act.i0minus]
    ineq += [_unit(w, sp.off_G + i, -ONE) for i in sp.act.iplus0]
    ineq += [_unit(w, sp.off_H + i, -ONE) for i in sp.act.i00]
    res = find_feasible(
        LinearSystem(tuple(eq_rows), vec(eq_rhs)),
        LinearSystem(tuple(ineq), zeros(len(ineq))),
    )
    if res.optimal:
        mult = _unpack(sp, res.point)
        if multiplier_image(inst, mult) != sp.neg_f or not in_regular_normal_cone(inst, mult):
            raise InternalError("strong-stationarity multiplier failed re-verification")
        return Certificate("s", True, multiplier=mult, assumptions=_assumptions(inst))
    return Certificate("s", False, refutation=res.farkas, assumptions=_assumptions(inst))


def _base_m_system(sp: _Space, width: int, off: int, rhs):
    eq_rows, eq_rhs = _image_eq(sp, width, off, rhs)
    sup = _support_eq_rows(sp, width, off)
    eq_rows += sup
    eq_rhs += [ZERO] * len(sup)
    ineq = [_unit(width, off + sp.off_g + i, -ONE) for i in sp.act.ig]
    ineq += [_unit(width, off + sp.off_H + i, -ONE) for i in sp.act.i0minus]
    ineq += [_unit(width, off + sp.off_G + i, -ONE) for i in sp.act.iplus0]
    return eq_rows, eq_rhs, ineq


def _m_branches(inst: MpvcInstance, cap: int):
    """Biactive limiting pieces: lam_G = 0 free lam_H, or lam_H = 0 with
    lam_G >= 0.  One feasibility question per combination."""
    sp = space(inst)
    k = len(sp.act.i00)
    exhaustive = 2**k <= cap
    w = sp.total
    base_eq, base_rhs, base_ineq = _base_m_system(sp, w, 0, sp.neg_f)
    feasible, refutations = [], []
    for mask in range(2**k if exhaustive else min(2**k, cap)):
        b_eq, b_ineq = [], []
        for bit, i in enumerate(sp.act.i00):
            if mask >> bit & 1:
                b_eq.append(_unit(w, sp.off_H + i))
                b_ineq.append(_unit(w, sp.off_G + i, -ONE))
            else:
                b_eq.append(_unit(w, sp.off_G + i))
        eq = LinearSystem(
            tuple(base_eq) + tuple(b_eq), vec(base_rhs) + zeros(len(b_eq))
        )
        ineq = tuple(base_ineq) + tuple(b_ineq)
        res = find_feasible(eq, LinearSystem(ineq, zeros(len(ineq))))
        if res.optimal:
            mult = _unpack(sp, res.point)
            if multiplier_image(inst, mult) != sp.neg_f or not in_limiting_normal_cone(inst, mult):
                raise InternalError("limiting multiplier failed re-verification")
            feasible.append((mask, mult))
        else:
            refutations.append((mask, res.farkas))
    return feasible, refutations, exhaustive


def check_m(inst: MpvcInstance, cap: int = DEFAULT_CAP) -> Certificate:
    feasible, refutations, exhaustive = _m_branches(inst, cap)
    if feasible:
        mask, mult = feasible[0]
        return Certificate(
            "m",
            True,
            multiplier=mult,
            assumptions=_assumptions(inst),
            detail={"branch_mask": mask, "feasible_branches": len(feasible)},
        )
    if not exhaustive:
        raise BranchLimitExceeded(1 << len(space(inst).act.i00), cap)
    return Certificate("m", False, refutation=tuple(refutations), assumptions=_assumptions(inst))


# ---------------------------------------------------------------------------
# partition-indexed cones and the two-multiplier concepts
# ---------------------------------------------------------------------------


def q_polar_hcone(inst: MpvcInstance, beta1: tuple, beta2: tuple):
    """Halfspace form of the partition cone's polar, in multiplier
    coordinates: support pattern, sign rows off the biactive set, the
    first block pinned to lam_G = 0, the second block nonnegative."""
    from .cones import HCone

    sp = space(inst)
    w = sp.total
    eq = list(_support_eq_rows(sp, w, 0))
    eq += [_unit(w, sp.off_G + i) for i in beta1]
    ineq = [_unit(w, sp.off_g + i, -ONE) for i in sp.act.ig]
    ineq += [_unit(w, sp.off_H + i, -ONE) for i in sp.act.i0minus]
    ineq += [_unit(w, sp.off_G + i, -ONE) for i in sp.act.iplus0]
    for i in beta2:
        ineq.append(_unit(w, sp.off_H + i, -ONE))
        ineq.append(_unit(w, sp.off_G + i, -ONE))
    return HCone(tuple(eq), tuple(ineq), w)


def _tagged_polar_image(sp: _Space, beta1, beta2):
    inst = sp.inst
    rays, ray_tags, lin, lin_tags = [], [], [], []
    for i in range(len(inst.h)):
        lin.append(inst.h[i].grad)
        lin_tags.append(("lam_h", i, ONE))
    for i in sp.act.ig:
        rays.append(inst.g[i].grad)
        ray_tags.append(("lam_g", i, ONE))
    for i in sp.act.i0minus:
        rays.append(tuple(-a for a in inst.H[i].grad))
        ray_tags.append(("lam_H", i, ONE))
    for i in sp.act.iplus0:
        rays.append(inst.G[i].grad)
        ray_tags.append(("lam_G", i, ONE))
    for i in sp.act.i0plus:
        lin.append(tuple(-a for a in inst.H[i].grad))
        lin_tags.append(("lam_H", i, ONE))
    for i in beta1:
        lin.append(tuple(-a for a in inst.H[i].grad))
        lin_tags.append(("lam_H", i, ONE))
    for i in beta2:
        rays.append(tuple(-a for a in inst.H[i].grad))
        ray_tags.append(("lam_H", i, ONE))
        rays.append(inst.G[i].grad)
        ray_tags.append(("lam_G", i, ONE))
    return GCone(tuple(rays), tuple(lin), inst.n), ray_tags, lin_tags


def _coeffs_to_multiplier(sp: _Space, tags_and_coeffs) -> PairMultiplier:
    arr = [ZERO] * sp.total
    offs = {"lam_h": sp.off_h, "lam_g": sp.off_g, "lam_G": sp.off_G, "lam_H": sp.off_H}
    for (block, i, sign), cf in tags_and_coeffs:
        arr[offs[block] + i] += sign * cf
    return _unpack(sp, arr)


@lru_cache(maxsize=4096)
def q_membership(inst: MpvcInstance, beta1: tuple, beta2: tuple):
    sp = space(inst)
    cone, ray_tags, lin_tags = _tagged_polar_image(sp, beta1, beta2)
    res = member(cone, sp.neg_f)
    mult = None
    if res.inside:
        pairs = list(zip(ray_tags, res.ray_coeffs)) + list(zip(lin_tags, res.lin_coeffs))
        mult = _coeffs_to_multiplier(sp, pairs)
        if multiplier_image(inst, mult) != sp.neg_f:
            raise InternalError("membership coefficients fail to realize the gradient")
    return res, mult


def _joint_q_rows(sp: _Space, p: Partition, width: int, off_l: int, off_m: int):
    eq_rows, eq_rhs = _image_eq(sp, width, off_l, sp.neg_f)
    k_rows, k_rhs = _image_eq(sp, width, off_m, zeros(sp.inst.n))
    eq_rows += k_rows
    eq_rhs += k_rhs
    for off in (off_l, off_m):
        sup = _support_eq_rows(sp, width, off)
        eq_rows += sup
        eq_rhs += [ZERO] * len(sup)
    ineq = []

    def bound(block_off, i):
        # lam >= max(mu, 0) on the given coordinate
        ineq.append(_unit(width, off_l + block_off + i, -ONE))
        r = [ZERO] * width
        r[off_m + block_off + i] = ONE
        r[off_l + block_off + i] = -ONE
        ineq.append(tuple(r))

    for i in sp.act.ig:
        bound(sp.off_g, i)
    for i in sp.act.i0minus:
        bound(sp.off_H, i)
    for i in sp.act.iplus0:
        bound(sp.off_G, i)
    for i in p.beta1:
        eq_rows.append(_unit(width, off_l + sp.off_G + i))
        eq_rhs.append(ZERO)
        r = [ZERO] * width
        r[off_m + sp.off_H + i] = ONE
        r[off_l + sp.off_H + i] = -ONE
        ineq.append(tuple(r))
        ineq.append(_unit(width, off_m + sp.off_G + i))  # mu_G <= 0
    for i in p.beta2:
        r = [ZERO] * width
        r[off_l + sp.off_G + i] = ONE
        r[off_m + sp.off_G + i] = -ONE
        eq_rows.append(tuple(r))
        eq_rhs.append(ZERO)
        ineq.append(_unit(width, off_l + sp.off_G + i, -ONE))
        ineq.append(_unit(width, off_l + sp.off_H + i, -ONE))
    return eq_rows, eq_rhs, ineq


def _verify_q_pair(sp: _Space, p: Partition, lam, mu):
    inst = sp.inst
    if multiplier_image(inst, lam) != sp.neg_f:
        raise InternalError("q multiplier fails to realize the gradient")
    if any(v != 0 for v in multiplier_image(inst, mu)):
        raise InternalError("second q multiplier is not in the kernel")
    for i in sp.act.ig:
        if lam.lam_g[i] < 0 or lam.lam_g[i] < mu.lam_g[i]:
            raise InternalError("q inequality violated on an active inequality")
    for i in sp.act.i0minus:
        if lam.lam_H[i] < 0 or lam.lam_H[i] < mu.lam_H[i]:
            raise InternalError("q inequality violated on a vanished pair")
    for i in sp.act.iplus0:
        if lam.lam_G[i] < 0 or lam.lam_G[i] < mu.lam_G[i]:
            raise InternalError("q inequality violated on a tight product row")
    for i in p.beta1:
        if lam.lam_G[i] != 0 or mu.lam_G[i] > 0 or lam.lam_H[i] < mu.lam_H[i]:
            raise InternalError("q inequality violated on the first block")
    for i in p.beta2:
        if lam.lam_H[i] < 0 or lam.lam_G[i] != mu.lam_G[i] or lam.lam_G[i] < 0:
            raise InternalError("q inequality violated on the second block")


def check_q(inst: MpvcInstance, p: Partition) -> Certificate:
    """Both routes: the explicit multiplier-pair system and the two
    polar-image memberships; they must agree."""
    sp = space(inst)
    m1, _ = q_membership(inst, p.beta1, p.beta2)
    m2, _ = q_membership(inst, p.beta2, p.beta1)
    member_verdict = m1.inside and m2.inside
    w = 2 * sp.total
    eq_rows, eq_rhs, ineq = _joint_q_rows(sp, p, w, 0, sp.total)
    res = find_feasible(
        LinearSystem(tuple(eq_rows), vec(eq_rhs)),
        LinearSystem(tuple(ineq), zeros(len(ineq))),
    )
    if res.optimal != member_verdict:
        raise InternalError("membership and system routes disagree")
    if not member_verdict:
        sep = m1.separator if not m1.inside else m2.separator
        return Certificate(
            "q", False, partition=p, refutation=("separator", sep), assumptions=_assumptions(inst)
        )
    lam = _unpack(sp, res.point[: sp.total])
    mu = _unpack(sp, res.point[sp.total :])
    _verify_q_pair(sp, p, lam, mu)
    return Certificate(
        "q", True, partition=p, multiplier=lam, multiplier2=mu, assumptions=_assumptions(inst)
    )


def _qm_partition_feasible(inst: MpvcInstance, p: Partition, cap: int):
    """Add the limiting-cone restriction: on the second block the
    product lam_H lam_G = 0 splits into two closed branches.  The cap
    bounds attempted combinations; the returned flag says whether the
    scan was exhaustive."""
    sp = space(inst)
    k = len(p.beta2)
    exhaustive = 2**k <= cap
    w = 2 * sp.total
    eq_rows, eq_rhs, ineq = _joint_q_rows(sp, p, w, 0, sp.total)
    refutations = []
    for mask in range(2**k if exhaustive else min(2**k, cap)):
        b_eq = []
        for bit, i in enumerate(p.beta2):
            b_eq.append(_unit(w, (sp.off_G if mask >> bit & 1 else sp.off_H) + i))
        eq = LinearSystem(tuple(eq_rows) + tuple(b_eq), vec(eq_rhs) + zeros(len(b_eq)))
        res = find_feasible(eq, LinearSystem(tuple(ineq), zeros(len(ineq))))
        if res.optimal:
            lam = _unpack(sp, res.point[: sp.total])
            mu = _unpack(sp, res.point[sp.total :])
            _verify_q_pair(sp, p, lam, mu)
            if not in_limiting_normal_cone(inst, lam):
                raise InternalError("qm multiplier escapes the limiting cone")
            return True, lam, mu, mask, refutations, exhaustive
        refutations.append((mask, res.farkas))
    return False, None, None, None, refutations, exhaustive


def check_qm(inst: MpvcInstance, cap: int = DEFAULT_CAP) -> Certificate:
    """First the full-first-block partition, whose multipliers lie in
    the limiting cone automatically; then the remaining partitions."""
    sp = space(inst)
    full = Partition(tuple(sp.act.i00), ())
    first = check_q(inst, full)
    if first.verdict:
        lam = first.multiplier
        if not in_limiting_normal_cone(inst, lam):
            raise InternalError("full-block q multiplier escapes the limiting cone")
        return Certificate(
            "qm",
            True,
            partition=full,
            multiplier=lam,
            multiplier2=first.multiplier2,
            assumptions=_assumptions(inst),
            detail={"via": "full-first-block partition"},
        )
    refutations = [(full, first.refutation)]
    complete = True
    try:
        rest = [p for p in enumerate_partitions(sp.act.i00, cap) if p != full]
    except PartitionLimitExceeded:
        # past the cap only the always-valid full-first-block partition
        # above is tried; a miss there is inconclusive, not a refusal
        rest, complete = [], False
    for p in rest:
        m1, _ = q_membership(inst, p.beta1, p.beta2)
        m2, _ = q_membership(inst, p.beta2, p.beta1)
        if not (m1.inside and m2.inside):
            sep = m1.separator if not m1.inside else m2.separator
            refutations.append((p, ("separator", sep)))
            continue
        ok, lam, mu, mask, refs, exhaustive = _qm_partition_feasible(inst, p, cap)
        if ok:
            return Certificate(
                "qm",
                True,
                partition=p,
                multiplier=lam,
                multiplier2=mu,
                assumptions=_assumptions(inst),
                detail={"branch_mask": mask},
            )
        complete = complete and exhaustive
        refutations.append((p, refs))
    if not complete:
        raise PartitionLimitExceeded(1 << len(sp.act.i00), cap)
    return Certificate("qm", False, refutation=tuple(refutations), assumptions=_assumptions(inst))


# ---------------------------------------------------------------------------
# the exactness qualification, decided two independent ways
# ---------------------------------------------------------------------------


def _kernel_cone_system(sp: _Space, p: Partition):
    """mu in the kernel subspace with mu_G <= 0 on the first block and
    mu_G >= 0 on the second."""
    w = sp.total
    eq_rows, eq_rhs = _image_eq(sp, w, 0, zeros(sp.inst.n))
    sup = _support_eq_rows(sp, w, 0)
    eq_rows += sup
    eq_rhs += [ZERO] * len(sup)
    ineq = [_unit(w, sp.off_G + i) for i in p.beta1]
    ineq += [_unit(w, sp.off_G + i, -ONE) for i in p.beta2]
    return (
        LinearSystem(tuple(eq_rows), vec(eq_rhs)),
        LinearSystem(tuple(ineq), zeros(len(ineq))),
    )


def _qual_primal(inst: MpvcInstance, p: Partition) -> bool:
    """Each first-block lam_H objective and the summed second-block
    lam_G objective must be bounded over the sign-restricted kernel."""
    sp = space(inst)
    eq, ub = _kernel_cone_system(sp, p)
    for j in p.beta1:
        res = solve_lp(_unit(sp.total, sp.off_H + j), eq, ub, sense="min")
        if res.status == "unbounded":
            return False
        if res.value != 0:
            raise InternalError("kernel-cone objective must vanish when bounded")
    if p.beta2:
        c = [ZERO] * sp.total
        for i in p.beta2:
            c[sp.off_G + i] = ONE
        res = solve_lp(tuple(c), eq, ub, sense="max")
        if res.status == "unbounded":
            return False
        if res.value != 0:
            raise InternalError("kernel-cone objective must vanish when bounded")
    return True


def _dual_direction_system(sp: _Space, p: Partition, pinned: int | None):
    """Rows of the dual direction systems; `pinned` is the first-block
    index whose H-row is set to -1 (None for the second-block system)."""
    inst = sp.inst
    eq_rows, eq_rhs, ineq_rows, ineq_rhs = [], [], [], []
    for fd in inst.h:
        eq_rows.append(fd.grad)
        eq_rhs.append(ZERO)
    for i in sp.act.ig:
        eq_rows.append(inst.g[i].grad)
        eq_rhs.append(ZERO)
    for i in sp.act.iplus0:
        eq_rows.append(inst.G[i].grad)
        eq_rhs.append(ZERO)
    for i in p.beta1:
        ineq_rows.append(tuple(-a for a in inst.G[i].grad))
        ineq_rhs.append(ZERO)
    for i in p.beta2:
        ineq_rows.append(inst.G[i].grad)
        ineq_rhs.append(ZERO if pinned is not None else -ONE)
    for i in sp.h_support:
        if i == pinned:
            eq_rows.append(inst.H[i].grad)
            eq_rhs.append(-ONE)
        else:
            eq_rows.append(inst.H[i].grad)
            eq_rhs.append(ZERO)
    return (
        LinearSystem(tuple(eq_rows), vec(eq_rhs)),
        LinearSystem(tuple(ineq_rows), vec(ineq_rhs)),
    )


def _qual_dual(inst: MpvcInstance, p: Partition):
    """Feasibility of one direction system per first-block index plus
    the second-block system; returns (ok, witnesses)."""
    sp = space(inst)
    witnesses = {}
    for j in p.beta1:
        eq, ub = _dual_direction_system(sp, p, j)
        res = find_feasible(eq, ub)
        if not res.optimal:
            return False, None
        witnesses[("h_row", j)] = res.point
    eq, ub = _dual_direction_system(sp, p, None)
    res = find_feasible(eq, ub)
    if not res.optimal:
        return False, None
    witnesses["second_block"] = res.point
    return True, witnesses


@dataclass(frozen=True)
class QualResult:
    ok: bool
    witnesses: dict | None
    violator: PairMultiplier | None


def qual_exactness(inst: MpvcInstance, p: Partition) -> QualResult:
    """When this holds for a partition, the strong concept coincides
    with the no-descent verdict there (the normal-cone formula is exact).

    Decided by the primal boundedness route and the dual feasibility
    route; a disagreement is a library defect.
    """
    primal = _qual_primal(inst, p)
    dual, wit = _qual_dual(inst, p)
    if primal != dual:
        raise InternalError("primal and dual qualification routes disagree")
    if primal:
        return QualResult(True, wit, None)
    violator = _qual_violator(inst, p)
    return QualResult(False, None, violator)


def _qual_violator(inst: MpvcInstance, p: Partition) -> PairMultiplier | None:
    """A kernel element witnessing failure: a first-block lam_H heading
    to minus infinity or a positive second-block lam_G."""
    sp = space(inst)
    eq, ub = _kernel_cone_system(sp, p)
    for j in p.beta1:
        res = solve_lp(_unit(sp.total, sp.off_H + j), eq, ub, sense="min")
        if res.status == "unbounded":
            return _unpack(sp, res.ray)
    if p.beta2:
        c = [ZERO] * sp.total
        for i in p.beta2:
            c[sp.off_G + i] = ONE
        res = solve_lp(tuple(c), eq, ub, sense="max")
        if res.status == "unbounded":
            return _unpack(sp, res.ray)
    return None


def in_nonnegative_pair_pattern(inst: MpvcInstance, mult: PairMultiplier) -> bool:
    """The sign pattern used by earlier vanishing-constraint optimality
    conditions: both pair blocks nonnegative on the biactive set."""
    sp = space(inst)
    for i, v in enumerate(mult.lam_g):
        if (i in sp.act.ig and v < 0) or (i not in sp.act.ig and v != 0):
            return False
    for i in range(len(inst.G)):
        lg, lh = mult.lam_G[i], mult.lam_H[i]
        if i not in sp.h_support and lh != 0:
            return False
        if i not in sp.g_support and lg != 0:
            return False
        if i in sp.act.i0minus and lh < 0:
            return False
        if i in sp.act.iplus0 and lg < 0:
            return False
        if i in sp.act.i00 and (lg < 0 or lh < 0):
            return False
    return True


def certify(inst: MpvcInstance, cap: int = DEFAULT_CAP) -> dict:
    from .oracle import b_stationary, implication_audit

    act = active_sets(inst)
    partitions = enumerate_partitions(act.i00, cap)
    certs = {
        "s": check_s(inst),
        "m": check_m(inst, cap),
        "q": {p: check_q(inst, p) for p in partitions},
        "qm": check_qm(inst, cap),
        "b_oracle": b_stationary(inst, cap),
    }
    quals = {"exactness": {p: qual_exactness(inst, p) for p in partitions}}
    swapped = Partition((), tuple(act.i00))
    if swapped in certs["q"] and certs["q"][swapped].verdict:
        lam = certs["q"][swapped].multiplier
        if not in_nonnegative_pair_pattern(inst, lam):
            raise InternalError(
                "full-second-block multiplier escapes the nonnegative pair pattern"
            )
        quals["nonnegative_pair_pattern_multiplier"] = lam
    violations = implication_audit(inst, cap, precomputed=certs)
    if violations:
        raise InternalError(f"implication audit failed: {violations}")
    return {"certificates": certs, "qualifications": quals, "partitions": partitions}
