"""Stationarity certification for complementarity-constrained programs.

The constraint block is rewritten as F(x) in D with
F = (h, g, -G_1, -H_1, ..., -G_mC, -H_mC), so a multiplier is the block
vector (lam_h, lam_g, lam_G, lam_H) and its image under the transposed
Jacobian is

    sum lam_h_i grad h_i + sum lam_g_i grad g_i
    - sum (lam_G_i grad G_i + lam_H_i grad H_i).

All checks reduce to exact feasibility questions over that multiplier
space: the strong concept uses the regular-normal-cone sign pattern,
the limiting concept enumerates the closed branches of the biactive
normal cone, and the two-multiplier concepts couple the multiplier with
an element of the kernel subspace through per-partition inequalities.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .certificates import Certificate, PairMultiplier
from .cones import GCone, HCone, member
from .errors import BranchLimitExceeded, InternalError, PartitionLimitExceeded
from .instances import (
    DEFAULT_CAP,
    MpccInstance,
    Partition,
    active_sets,
    enumerate_partitions,
)
from .lp import LinearSystem, find_feasible, solve_lp, strict_feasible
from . import linalg
from .rationals import ZERO, ONE, Vec, dot, vec, zeros


@dataclass(frozen=True)
class _Space:
    """Cached multiplier-space machinery for one instance."""

    inst: MpccInstance
    act: object
    off_h: int
    off_g: int
    off_G: int
    off_H: int
    total: int
    t_rows: tuple  # n x total map: multiplier -> gradient combination
    neg_f: Vec


@lru_cache(maxsize=256)
def space(inst: MpccInstance) -> _Space:
    act = active_sets(inst)
    m_e, m_i, m_c = len(inst.h), len(inst.g), len(inst.G)
    off_h, off_g = 0, m_e
    off_cg, off_ch = m_e + m_i, m_e + m_i + m_c
    total = m_e + m_i + 2 * m_c
    t_rows = []
    for j in range(inst.n):
        row = [ZERO] * total
        for i, fd in enumerate(inst.h):
            row[off_h + i] = fd.grad[j]
        for i, fd in enumerate(inst.g):
            row[off_g + i] = fd.grad[j]
        for i, fd in enumerate(inst.G):
            row[off_cg + i] = -fd.grad[j]
        for i, fd in enumerate(inst.H):
            row[off_ch + i] = -fd.grad[j]
        t_rows.append(tuple(row))
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
    )


def _unit(width: int, j: int, coeff=ONE) -> Vec:
    row = [ZERO] * width
    row[j] = coeff
    return tuple(row)


def _shift(rows, width: int, off: int):
    return tuple((ZERO,) * off + tuple(r) + (ZERO,) * (width - off - len(r)) for r in rows)


def _support_eq_rows(sp: _Space, width: int, off: int):
    """Rows forcing the admissible support pattern of a multiplier block."""
    rows = []
    for i in range(len(sp.inst.g)):
        if i not in sp.act.ig:
            rows.append(_unit(width, off + sp.off_g + i))
    for i in sp.act.iplus0:
        rows.append(_unit(width, off + sp.off_G + i))
    for i in sp.act.i0plus:
        rows.append(_unit(width, off + sp.off_H + i))
    return rows


def _image_eq(sp: _Space, width: int, off: int, rhs: Vec):
    rows = _shift(sp.t_rows, width, off)
    return list(rows), list(rhs)


def _nhat_ineq_rows(sp: _Space, width: int, off: int):
    rows = []
    for i in sp.act.ig:
        rows.append(_unit(width, off + sp.off_g + i, -ONE))
    for i in sp.act.i00:
        rows.append(_unit(width, off + sp.off_G + i, -ONE))
        rows.append(_unit(width, off + sp.off_H + i, -ONE))
    return rows


def _unpack(sp: _Space, arr) -> PairMultiplier:
    m_e, m_i, m_c = len(sp.inst.h), len(sp.inst.g), len(sp.inst.G)
    return PairMultiplier(
        tuple(arr[sp.off_h : sp.off_h + m_e]),
        tuple(arr[sp.off_g : sp.off_g + m_i]),
        tuple(arr[sp.off_G : sp.off_G + m_c]),
        tuple(arr[sp.off_H : sp.off_H + m_c]),
    )


def _pack(sp: _Space, mult: PairMultiplier) -> Vec:
    return tuple(mult.lam_h) + tuple(mult.lam_g) + tuple(mult.lam_G) + tuple(mult.lam_H)


def multiplier_image(inst: MpccInstance, mult: PairMultiplier) -> Vec:
    sp = space(inst)
    arr = _pack(sp, mult)
    return tuple(dot(row, arr) for row in sp.t_rows)


def _assumptions(inst) -> tuple:
    return (
        "GGCQ asserted" if inst.ggcq_asserted else "GGCQ assumed (not verifiable from point data)",
    )


def in_regular_normal_cone(inst: MpccInstance, mult: PairMultiplier) -> bool:
    """Sign pattern of the regular normal cone to D at F(xbar)."""
    act = active_sets(inst)
    for i, v in enumerate(mult.lam_g):
        if (i in act.ig and v < 0) or (i not in act.ig and v != 0):
            return False
    for i in range(len(inst.G)):
        lg, lh = mult.lam_G[i], mult.lam_H[i]
        if i in act.iplus0 and lg != 0:
            return False
        if i in act.i0plus and lh != 0:
            return False
        if i in act.i00 and (lg < 0 or lh < 0):
            return False
    return True


def in_limiting_normal_cone(inst: MpccInstance, mult: PairMultiplier) -> bool:
    """Sign pattern of the limiting normal cone: biactive pairs need
    either both entries positive or a zero product."""
    act = active_sets(inst)
    for i, v in enumerate(mult.lam_g):
        if (i in act.ig and v < 0) or (i not in act.ig and v != 0):
            return False
    for i in range(len(inst.G)):
        lg, lh = mult.lam_G[i], mult.lam_H[i]
        if i in act.iplus0 and lg != 0:
            return False
        if i in act.i0plus and lh != 0:
            return False
        if i in act.i00 and not ((lg > 0 and lh > 0) or lg * lh == 0):
            return False
    return True


# ---------------------------------------------------------------------------
# strong stationarity
# ---------------------------------------------------------------------------


def check_s(inst: MpccInstance) -> Certificate:
    """-grad f realizable with a regular-normal-cone multiplier."""
    sp = space(inst)
    w = sp.total
    eq_rows, eq_rhs = _image_eq(sp, w, 0, sp.neg_f)
    sup = _support_eq_rows(sp, w, 0)
    eq = LinearSystem(tuple(eq_rows) + tuple(sup), tuple(eq_rhs) + zeros(len(sup)))
    ineq = tuple(_nhat_ineq_rows(sp, w, 0))
    res = find_feasible(eq, LinearSystem(ineq, zeros(len(ineq))))
    if res.optimal:
        mult = _unpack(sp, res.point)
        if multiplier_image(inst, mult) != sp.neg_f or not in_regular_normal_cone(inst, mult):
            raise InternalError("strong-stationarity multiplier failed re-verification")
        return Certificate("s", True, multiplier=mult, assumptions=_assumptions(inst))
    return Certificate("s", False, refutation=res.farkas, assumptions=_assumptions(inst))


# ---------------------------------------------------------------------------
# limiting (M-) stationarity via closed branch enumeration
# ---------------------------------------------------------------------------

_BRANCH_BOTH, _BRANCH_G0, _BRANCH_H0 = 0, 1, 2


def _m_branch_rows(sp: _Space, width: int, off: int, branch):
    """Sign rows for one closed branch of the biactive limiting cone."""
    eq_rows, ineq_rows = [], []
    for i, choice in zip(sp.act.i00, branch):
        gj, hj = off + sp.off_G + i, off + sp.off_H + i
        if choice == _BRANCH_BOTH:
            ineq_rows += [_unit(width, gj, -ONE), _unit(width, hj, -ONE)]
        elif choice == _BRANCH_G0:
            eq_rows.append(_unit(width, gj))
        else:
            eq_rows.append(_unit(width, hj))
    return eq_rows, ineq_rows


def _base_m_system(sp: _Space, width: int, off: int, rhs: Vec):
    eq_rows, eq_rhs = _image_eq(sp, width, off, rhs)
    sup = _support_eq_rows(sp, width, off)
    eq_rows += sup
    eq_rhs += [ZERO] * len(sup)
    ineq_rows = [_unit(width, off + sp.off_g + i, -ONE) for i in sp.act.ig]
    return eq_rows, eq_rhs, ineq_rows


def _m_branches(inst: MpccInstance, cap: int):
    """Feasibility per closed branch combination, deterministic order.

    The cap bounds attempted combinations: with the budget spent and
    nothing feasible the scan is inconclusive (`exhaustive` False), so
    callers may only conclude absence when `exhaustive` is True."""
    sp = space(inst)
    k = len(sp.act.i00)
    exhaustive = 3**k <= cap
    w = sp.total
    base_eq, base_rhs, base_ineq = _base_m_system(sp, w, 0, sp.neg_f)
    feasible, refutations = [], []
    attempted = 0
    for branch in product((_BRANCH_BOTH, _BRANCH_G0, _BRANCH_H0), repeat=k):
        if attempted >= cap and not exhaustive:
            break
        attempted += 1
        b_eq, b_ineq = _m_branch_rows(sp, w, 0, branch)
        eq = LinearSystem(
            tuple(base_eq) + tuple(b_eq), tuple(base_rhs) + zeros(len(b_eq))
        )
        ineq = tuple(base_ineq) + tuple(b_ineq)
        res = find_feasible(eq, LinearSystem(ineq, zeros(len(ineq))))
        if res.optimal:
            mult = _unpack(sp, res.point)
            if multiplier_image(inst, mult) != sp.neg_f or not in_limiting_normal_cone(inst, mult):
                raise InternalError("limiting multiplier failed re-verification")
            feasible.append((branch, mult))
        else:
            refutations.append((branch, res.farkas))
    return feasible, refutations, exhaustive


def check_m(inst: MpccInstance, cap: int = DEFAULT_CAP) -> Certificate:
    """-grad f realizable with a limiting-normal-cone multiplier."""
    feasible, refutations, exhaustive = _m_branches(inst, cap)
    if feasible:
        branch, mult = feasible[0]
        return Certificate(
            "m",
            True,
            multiplier=mult,
            assumptions=_assumptions(inst),
            detail={"branch": branch, "feasible_branches": len(feasible)},
        )
    if not exhaustive:
        raise BranchLimitExceeded(3 ** len(active_sets(inst).i00), cap)
    return Certificate(
        "m",
        False,
        refutation=tuple(refutations),
        assumptions=_assumptions(inst),
    )


def m_multiplier_hull(inst: MpccInstance, cap: int = DEFAULT_CAP):
    """Coordinatewise exact min/max of the limiting multipliers.

    Returns (unique, point_or_None, box) where box maps coordinate index
    to (min, max), entries None when unbounded on some feasible branch.
    """
    sp = space(inst)
    k = len(sp.act.i00)
    if 3**k > cap:
        raise BranchLimitExceeded(3**k, cap)
    w = sp.total
    base_eq, base_rhs, base_ineq = _base_m_system(sp, w, 0, sp.neg_f)
    lo = [None] * w
    hi = [None] * w
    any_feasible = False
    for branch in product((_BRANCH_BOTH, _BRANCH_G0, _BRANCH_H0), repeat=k):
        b_eq, b_ineq = _m_branch_rows(sp, w, 0, branch)
        eq = LinearSystem(
            tuple(base_eq) + tuple(b_eq), tuple(base_rhs) + zeros(len(b_eq))
        )
        ineq = LinearSystem(
            tuple(base_ineq) + tuple(b_ineq), zeros(len(base_ineq) + len(b_ineq))
        )
        if not find_feasible(eq, ineq).optimal:
            continue
        any_feasible = True
        for j in range(w):
            c = _unit(w, j)
            for sense, store, better in (("min", lo, min), ("max", hi, max)):
                if store[j] == "unbounded":
                    continue
                res = solve_lp(c, eq, ineq, sense=sense)
                if res.status == "unbounded":
                    store[j] = "unbounded"
                elif store[j] is None:
                    store[j] = res.value
                else:
                    store[j] = better(store[j], res.value)
    if not any_feasible:
        return False, None, None
    box = tuple(zip(lo, hi))
    unique = all(a != "unbounded" and b != "unbounded" and a == b for a, b in box)
    point = _unpack(sp, [a for a, _ in box]) if unique else None
    return unique, point, box


# ---------------------------------------------------------------------------
# structured cone pairs and the two-multiplier concepts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QccPair:
    """The partition-indexed cone pair, all four descriptions explicit.

    `q1`/`q2` live in the constraint-image space (block coordinates
    matching the multiplier layout); `q1_polar`/`q2_polar` are the
    polars in the same coordinates, written directly as sign patterns.
    """

    partition: Partition
    q1: HCone
    q2: HCone
    q1_polar: HCone
    q2_polar: HCone


def _q_hcone(sp: _Space, beta1, beta2) -> HCone:
    w = sp.total
    eq, ineq = [], []
    for i in range(len(sp.inst.h)):
        eq.append(_unit(w, sp.off_h + i))
    for i in sp.act.ig:
        ineq.append(_unit(w, sp.off_g + i))
    for i in sp.act.i0plus:
        eq.append(_unit(w, sp.off_G + i))
    for i in sp.act.iplus0:
        eq.append(_unit(w, sp.off_H + i))
    for i in beta1:
        eq.append(_unit(w, sp.off_G + i))
        ineq.append(_unit(w, sp.off_H + i))
    for i in beta2:
        ineq.append(_unit(w, sp.off_G + i))
        eq.append(_unit(w, sp.off_H + i))
    return HCone(tuple(eq), tuple(ineq), w)


def _q_polar_hcone(sp: _Space, beta1, beta2) -> HCone:
    w = sp.total
    eq = list(_support_eq_rows(sp, w, 0))
    ineq = [_unit(w, sp.off_g + i, -ONE) for i in sp.act.ig]
    ineq += [_unit(w, sp.off_H + i, -ONE) for i in beta1]
    ineq += [_unit(w, sp.off_G + i, -ONE) for i in beta2]
    return HCone(tuple(eq), tuple(ineq), w)


def build_qcc_pair(inst: MpccInstance, p: Partition) -> QccPair:
    sp = space(inst)
    return QccPair(
        p,
        _q_hcone(sp, p.beta1, p.beta2),
        _q_hcone(sp, p.beta2, p.beta1),
        _q_polar_hcone(sp, p.beta1, p.beta2),
        _q_polar_hcone(sp, p.beta2, p.beta1),
    )


def _tagged_polar_image(sp: _Space, beta1, beta2):
    """The polar's image under the transposed Jacobian, as a generator
    cone in R^n, with each generator tagged by its multiplier coordinate."""
    inst = sp.inst
    rays, ray_tags, lin, lin_tags = [], [], [], []
    for i in range(len(inst.h)):
        lin.append(inst.h[i].grad)
        lin_tags.append(("lam_h", i, ONE))
    for i in sp.act.ig:
        rays.append(inst.g[i].grad)
        ray_tags.append(("lam_g", i, ONE))
    for i in list(sp.act.i0plus) + list(beta1):
        lin.append(tuple(-a for a in inst.G[i].grad))
        lin_tags.append(("lam_G", i, ONE))
    for i in list(sp.act.iplus0) + list(beta2):
        lin.append(tuple(-a for a in inst.H[i].grad))
        lin_tags.append(("lam_H", i, ONE))
    for i in beta1:
        rays.append(tuple(-a for a in inst.H[i].grad))
        ray_tags.append(("lam_H", i, ONE))
    for i in beta2:
        rays.append(tuple(-a for a in inst.G[i].grad))
        ray_tags.append(("lam_G", i, ONE))
    return GCone(tuple(rays), tuple(lin), inst.n), ray_tags, lin_tags


def _coeffs_to_multiplier(sp: _Space, tags_and_coeffs) -> PairMultiplier:
    arr = [ZERO] * sp.total
    offs = {"lam_h": sp.off_h, "lam_g": sp.off_g, "lam_G": sp.off_G, "lam_H": sp.off_H}
    for (block, i, sign), cf in tags_and_coeffs:
        arr[offs[block] + i] += sign * cf
    return _unpack(sp, arr)


@lru_cache(maxsize=4096)
def q_membership(inst: MpccInstance, beta1: tuple, beta2: tuple):
    """-grad f membership in the image of one structured polar cone."""
    sp = space(inst)
    cone, ray_tags, lin_tags = _tagged_polar_image(sp, beta1, beta2)
    res = member(cone, sp.neg_f)
    mult = None
    if res.inside:
        pairs = list(zip(ray_tags, res.ray_coeffs)) + list(zip(lin_tags, res.lin_coeffs))
        mult = _coeffs_to_multiplier(sp, pairs)
        if multiplier_image(inst, mult) != sp.neg_f:
            raise InternalError("membership coefficients fail to realize the gradient")
        if not _q_polar_hcone(sp, beta1, beta2).contains(_pack(sp, mult)):
            raise InternalError("membership multiplier escapes the polar sign pattern")
    return res, mult


def _joint_q_rows(sp: _Space, p: Partition, width: int, off_l: int, off_m: int):
    """Equalities/inequalities coupling the multiplier with a kernel
    element: the per-partition system behind the two-membership test."""
    eq_rows, eq_rhs = _image_eq(sp, width, off_l, sp.neg_f)
    k_rows, k_rhs = _image_eq(sp, width, off_m, zeros(sp.inst.n))
    eq_rows += k_rows
    eq_rhs += k_rhs
    for off in (off_l, off_m):
        sup = _support_eq_rows(sp, width, off)
        eq_rows += sup
        eq_rhs += [ZERO] * len(sup)
    ineq = []
    for i in sp.act.ig:
        ineq.append(_unit(width, off_l + sp.off_g + i, -ONE))
        r = [ZERO] * width
        r[off_m + sp.off_g + i] = ONE
        r[off_l + sp.off_g + i] = -ONE
        ineq.append(tuple(r))
    for i in p.beta1:
        r = [ZERO] * width
        r[off_m + sp.off_G + i] = ONE
        r[off_l + sp.off_G + i] = -ONE
        ineq.append(tuple(r))
        ineq.append(_unit(width, off_l + sp.off_H + i, -ONE))
    for i in p.beta2:
        ineq.append(_unit(width, off_l + sp.off_G + i, -ONE))
        r = [ZERO] * width
        r[off_m + sp.off_H + i] = ONE
        r[off_l + sp.off_H + i] = -ONE
        ineq.append(tuple(r))
    return eq_rows, eq_rhs, ineq


def check_q(inst: MpccInstance, p: Partition) -> Certificate:
    """Two polar-image memberships; a witness pair is recovered jointly."""
    sp = space(inst)
    m1, _ = q_membership(inst, p.beta1, p.beta2)
    m2, _ = q_membership(inst, p.beta2, p.beta1)
    verdict = m1.inside and m2.inside
    if not verdict:
        sep = m1.separator if not m1.inside else m2.separator
        cert = Certificate(
            "q",
            False,
            partition=p,
            refutation=("separator", sep),
            assumptions=_assumptions(inst),
        )
        return cert
    w = 2 * sp.total
    eq_rows, eq_rhs, ineq = _joint_q_rows(sp, p, w, 0, sp.total)
    res = find_feasible(
        LinearSystem(tuple(eq_rows), vec(eq_rhs)),
        LinearSystem(tuple(ineq), zeros(len(ineq))),
    )
    if not res.optimal:
        raise InternalError("membership and joint system routes disagree")
    lam = _unpack(sp, res.point[: sp.total])
    mu = _unpack(sp, res.point[sp.total :])
    _verify_q_pair(sp, p, lam, mu)
    return Certificate(
        "q",
        True,
        partition=p,
        multiplier=lam,
        multiplier2=mu,
        assumptions=_assumptions(inst),
    )


def _verify_q_pair(sp: _Space, p: Partition, lam, mu):
    inst = sp.inst
    if multiplier_image(inst, lam) != sp.neg_f:
        raise InternalError("q multiplier fails to realize the gradient")
    if any(v != 0 for v in multiplier_image(inst, mu)):
        raise InternalError("second q multiplier is not in the kernel")
    for i in sp.act.ig:
        if lam.lam_g[i] < 0 or lam.lam_g[i] < mu.lam_g[i]:
            raise InternalError("q inequality violated on an active inequality")
    for i in p.beta1:
        if lam.lam_G[i] < mu.lam_G[i] or lam.lam_H[i] < 0:
            raise InternalError("q inequality violated on the first block")
    for i in p.beta2:
        if lam.lam_G[i] < 0 or lam.lam_H[i] < mu.lam_H[i]:
            raise InternalError("q inequality violated on the second block")


def _qm_partition_feasible(inst: MpccInstance, p: Partition, cap: int):
    """The per-partition system with the multiplier limited to the
    limiting cone: two residual branch choices per biactive index.
    Returns an extra flag telling whether the scan was exhaustive."""
    sp = space(inst)
    k = len(sp.act.i00)
    exhaustive = 2**k <= cap
    w = 2 * sp.total
    eq_rows, eq_rhs, ineq = _joint_q_rows(sp, p, w, 0, sp.total)
    refutations = []
    for mask in range(min(2**k, cap if not exhaustive else 2**k)):
        b_eq, b_ineq = [], []
        for bit, i in enumerate(sp.act.i00):
            gj, hj = sp.off_G + i, sp.off_H + i
            primary = i in p.beta1
            if mask >> bit & 1:
                b_eq.append(_unit(w, hj if primary else gj))
            else:
                b_ineq.append(_unit(w, (gj if primary else hj), -ONE))
        eq = LinearSystem(tuple(eq_rows) + tuple(b_eq), vec(eq_rhs) + zeros(len(b_eq)))
        ub = LinearSystem(
            tuple(ineq) + tuple(b_ineq), zeros(len(ineq) + len(b_ineq))
        )
        res = find_feasible(eq, ub)
        if res.optimal:
            lam = _unpack(sp, res.point[: sp.total])
            mu = _unpack(sp, res.point[sp.total :])
            _verify_q_pair(sp, p, lam, mu)
            if not in_limiting_normal_cone(inst, lam):
                raise InternalError("qm multiplier escapes the limiting cone")
            return True, lam, mu, mask, refutations, exhaustive
        refutations.append((mask, res.farkas))
    return False, None, None, None, refutations, exhaustive


def remark_partition(inst: MpccInstance, mult: PairMultiplier) -> Partition:
    """Heuristic partition from a limiting multiplier: indices with a
    nonnegative lam_H entry go to the first block."""
    act = active_sets(inst)
    b1 = tuple(i for i in act.i00 if mult.lam_H[i] >= 0)
    b2 = tuple(i for i in act.i00 if mult.lam_H[i] < 0)
    return Partition(b1, b2)


def check_qm(
    inst: MpccInstance, p: Partition | None = None, cap: int = DEFAULT_CAP
) -> Certificate:
    """The directional concept with the multiplier inside the limiting cone.

    With no explicit partition, heuristic partitions derived from the
    limiting multipliers are tried first, then all partitions up to the
    cap.
    """
    sp = space(inst)
    feasible_m, _, m_exhaustive = _m_branches(inst, cap)
    if not feasible_m:
        if not m_exhaustive:
            raise BranchLimitExceeded(3 ** len(sp.act.i00), cap)
        return Certificate(
            "qm",
            False,
            refutation=("not-m-stationary",),
            assumptions=_assumptions(inst),
            detail={"reason": "no limiting multiplier exists"},
        )
    complete = True
    if p is not None:
        candidates = [p]
    else:
        seen, candidates = set(), []
        for _, mult in feasible_m:
            cand = remark_partition(inst, mult)
            if cand not in seen:
                seen.add(cand)
                candidates.append(cand)
        try:
            for cand in enumerate_partitions(sp.act.i00, cap):
                if cand not in seen:
                    seen.add(cand)
                    candidates.append(cand)
        except PartitionLimitExceeded:
            # past the cap the check is restricted to the heuristic
            # partitions; a success below is still sound, a miss is not
            complete = False
    tried, refutations = [], []
    for cand in candidates:
        ok, lam, mu, mask, refs, exhaustive = _qm_partition_feasible(inst, cand, cap)
        tried.append(cand)
        if ok:
            return Certificate(
                "qm",
                True,
                partition=cand,
                multiplier=lam,
                multiplier2=mu,
                assumptions=_assumptions(inst),
                detail={"branch_mask": mask, "partitions_tried": len(tried)},
            )
        complete = complete and exhaustive
        refutations.append((cand, refs))
    if not complete:
        raise PartitionLimitExceeded(1 << len(sp.act.i00), cap)
    return Certificate(
        "qm",
        False,
        refutation=tuple(refutations),
        assumptions=_assumptions(inst),
        detail={"partitions_tried": len(tried)},
    )


# ---------------------------------------------------------------------------
# nonsingularity analysis and the sign-product qualifications
# ---------------------------------------------------------------------------


def relaxed_system(inst: MpccInstance):
    """Direction-space system with the biactive complementarity dropped."""
    sp = space(inst)
    act = sp.act
    eq_rows = [fd.grad for fd in inst.h]
    eq_rows += [tuple(-a for a in inst.G[i].grad) for i in act.i0plus]
    eq_rows += [tuple(-a for a in inst.H[i].grad) for i in act.iplus0]
    ineq_rows = [inst.g[i].grad for i in act.ig]
    tag = {}
    for i in act.i00:
        tag[("G", i)] = len(ineq_rows)
        ineq_rows.append(tuple(-a for a in inst.G[i].grad))
    for i in act.i00:
        tag[("H", i)] = len(ineq_rows)
        ineq_rows.append(tuple(-a for a in inst.H[i].grad))
    return (
        LinearSystem(tuple(eq_rows), zeros(len(eq_rows))),
        LinearSystem(tuple(ineq_rows), zeros(len(ineq_rows))),
        tag,
    )


def nonsingular_sets(inst: MpccInstance):
    """Biactive rows that admit strict satisfaction in the relaxed system."""
    act = active_sets(inst)
    eq, ub, tag = relaxed_system(inst)
    beta_g, beta_h = [], []
    for i in act.i00:
        if strict_feasible(eq, ub, (tag[("G", i)],)).ok:
            beta_g.append(i)
        if strict_feasible(eq, ub, (tag[("H", i)],)).ok:
            beta_h.append(i)
    beta_gh = tuple(i for i in beta_g if i in beta_h)
    return tuple(beta_g), tuple(beta_h), beta_gh


def kernel_system(inst: MpccInstance):
    """Equalities cutting out the kernel multiplier subspace."""
    sp = space(inst)
    rows, rhs = _image_eq(sp, sp.total, 0, zeros(inst.n))
    sup = _support_eq_rows(sp, sp.total, 0)
    return LinearSystem(tuple(rows) + tuple(sup), vec(rhs) + zeros(len(sup)))


def in_kernel(inst: MpccInstance, mu: PairMultiplier) -> bool:
    sp = space(inst)
    arr = _pack(sp, mu)
    ksys = kernel_system(inst)
    return all(dot(row, arr) == b for row, b in zip(ksys.a, ksys.b))


@dataclass(frozen=True)
class QualResult:
    ok: bool
    witness: PairMultiplier | None
    pairs: tuple  # the coordinate pairs whose products must be nonnegative


def _coord(sp: _Space, which: str, i: int) -> int:
    return (sp.off_G if which == "G" else sp.off_H) + i


def _sign_pairs_for_partition(beta1, beta2):
    pairs = []
    for i in beta1:
        for ip in beta2:
            pairs.append((("G", i), ("G", ip)))
            pairs.append((("H", i), ("H", ip)))
    for i in beta1:
        for ip in beta1:
            pairs.append((("G", i), ("H", ip)))
    for i in beta2:
        for ip in beta2:
            pairs.append((("G", i), ("H", ip)))
    return tuple(pairs)


def _decide_sign_products(inst: MpccInstance, pairs) -> QualResult:
    """Each product must be nonnegative over the kernel subspace; by
    symmetry one strict-feasibility query per pair decides it."""
    sp = space(inst)
    ksys = kernel_system(inst)
    for (wa, ia), (wb, ib) in pairs:
        a, b = _coord(sp, wa, ia), _coord(sp, wb, ib)
        rows = (_unit(sp.total, a, -ONE), _unit(sp.total, b, ONE))
        res = strict_feasible(ksys, LinearSystem(rows, zeros(2)), (0, 1))
        if res.ok:
            wit = _unpack(sp, res.witness)
            if not in_kernel(inst, wit):
                raise InternalError("sign-product witness escapes the kernel")
            return QualResult(False, wit, tuple(pairs))
    return QualResult(True, None, tuple(pairs))


def qual_sign_products(inst: MpccInstance, p: Partition) -> QualResult:
    """Partition sign-product qualification: when it holds, the strong
    and directional verdicts coincide (the normal-cone formula is exact)."""
    return _decide_sign_products(inst, _sign_pairs_for_partition(p.beta1, p.beta2))


def qual_sign_products_nonsingular(inst: MpccInstance, p: Partition) -> QualResult:
    """The same test run on a partition of the doubly-nonsingular set."""
    _, _, beta_gh = nonsingular_sets(inst)
    if set(p.beta1) | set(p.beta2) != set(beta_gh) or set(p.beta1) & set(p.beta2):
        raise ValueError("partition must split the doubly-nonsingular set")
    return _decide_sign_products(inst, _sign_pairs_for_partition(p.beta1, p.beta2))


def qual_pang_fukushima(inst: MpccInstance, p: Partition) -> QualResult:
    """The Pang-Fukushima comparison condition on the same partition;
    its pair families reach outside the doubly-nonsingular set."""
    beta_g, beta_h, beta_gh = nonsingular_sets(inst)
    if set(p.beta1) | set(p.beta2) != set(beta_gh) or set(p.beta1) & set(p.beta2):
        raise ValueError("partition must split the doubly-nonsingular set")
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
    return _decide_sign_products(inst, tuple(pairs))


def violates_sign_products(inst: MpccInstance, pairs, mu: PairMultiplier) -> bool:
    """A valid violation witness: kernel membership plus one negative product."""
    if not in_kernel(inst, mu):
        return False
    val = {"G": mu.lam_G, "H": mu.lam_H}
    return any(val[wa][ia] * val[wb][ib] < 0 for (wa, ia), (wb, ib) in pairs)


def check_licq(inst: MpccInstance) -> bool:
    """Linear independence of all active constraint gradients."""
    act = active_sets(inst)
    rows = [fd.grad for fd in inst.h]
    rows += [inst.g[i].grad for i in act.ig]
    rows += [inst.G[i].grad for i in list(act.i0plus) + list(act.i00)]
    rows += [inst.H[i].grad for i in list(act.iplus0) + list(act.i00)]
    return linalg.rank(rows) == len(rows)


def certify(inst: MpccInstance, cap: int = DEFAULT_CAP) -> dict:
    """Run every check and cross-validate the implication diagram."""
    from .oracle import b_stationary, implication_audit

    act = active_sets(inst)
    partitions = enumerate_partitions(act.i00, cap)
    certs = {
        "s": check_s(inst),
        "m": check_m(inst, cap),
        "q": {p: check_q(inst, p) for p in partitions},
        "qm": check_qm(inst, cap=cap),
        "b_oracle": b_stationary(inst, cap),
    }
    beta_g, beta_h, beta_gh = nonsingular_sets(inst)
    gh_partitions = enumerate_partitions(beta_gh, cap)
    quals = {
        "nonsingular": {"beta_g": beta_g, "beta_h": beta_h, "beta_gh": beta_gh},
        "sign_products": {p: qual_sign_products(inst, p) for p in partitions},
        "sign_products_nonsingular": {
            p: qual_sign_products_nonsingular(inst, p) for p in gh_partitions
        },
        "pang_fukushima": {p: qual_pang_fukushima(inst, p) for p in gh_partitions},
        "licq": check_licq(inst),
    }
    violations = implication_audit(inst, cap, precomputed=certs)
    if violations:
        raise InternalError(f"implication audit failed: {violations}")
    return {"certificates": certs, "qualifications": quals, "partitions": partitions}
