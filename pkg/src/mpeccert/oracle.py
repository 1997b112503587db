"""Independent brute-force certifiers and random instance generators.

The no-descent check here is deliberately naive: enumerate the convex
branches whose union is the linearized tangent cone and minimise the
objective gradient over each one by LP.  Since every branch is a cone
containing the origin, each branch optimum is either zero or minus
infinity, and an unbounded branch hands back an explicit descent
direction.  The verdict refers to the linearized cone; it equals
no-descent-direction stationarity whenever the Guignard-type
qualification holds, and the certificate says so.

`implication_audit` evaluates every concept and checks the known
implications between them; a violation is reported as a library defect,
never as a property of the instance.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .certificates import Certificate
from .cones import HCone
from .errors import BranchLimitExceeded, InternalError
from .instances import (
    DEFAULT_CAP,
    FunData,
    GeConstraint,
    GeInstance,
    MpccInstance,
    MpvcInstance,
    Partition,
    active_sets,
    enumerate_partitions,
)
from .lp import LinearSystem, find_feasible, solve_lp
from .rationals import ZERO, ONE, Vec, dot, rat, vec, zeros


@dataclass(frozen=True)
class Branch:
    """One convex piece of the linearized cone, possibly with trailing
    existential auxiliary coordinates (used by the GE preimages)."""

    cone: HCone
    aux: int
    label: object

    def contains(self, x) -> bool:
        d = self.cone.dim - self.aux
        if len(x) != d:
            raise ValueError("point must have the branch's base dimension")
        if self.aux == 0:
            return self.cone.contains(x)
        eq_rows, ineq_rows, eq_rhs, ineq_rhs = [], [], [], []
        for row in self.cone.eq:
            eq_rows.append(row[d:])
            eq_rhs.append(-dot(row[:d], x))
        for row in self.cone.ineq:
            ineq_rows.append(row[d:])
            ineq_rhs.append(-dot(row[:d], x))
        return find_feasible(
            LinearSystem(tuple(eq_rows), vec(eq_rhs)),
            LinearSystem(tuple(ineq_rows), vec(ineq_rhs)),
        ).optimal


@dataclass(frozen=True)
class BranchFamily:
    dim: int  # base dimension (directions live here)
    branches: tuple


def linearized_branches(inst, cap: int = DEFAULT_CAP) -> BranchFamily:
    if isinstance(inst, MpccInstance):
        return _mpcc_branches(inst, cap)
    if isinstance(inst, MpvcInstance):
        return _mpvc_branches(inst, cap)
    if isinstance(inst, GeInstance):
        return _ge_branches(inst, cap)
    raise TypeError(f"no branch family for {type(inst).__name__}")


def _mpcc_branches(inst: MpccInstance, cap: int) -> BranchFamily:
    act = active_sets(inst)
    parts = enumerate_partitions(act.i00, cap)
    neg = lambda fd: tuple(-a for a in fd.grad)
    base_eq = [fd.grad for fd in inst.h]
    base_eq += [neg(inst.G[i]) for i in act.i0plus]
    base_eq += [neg(inst.H[i]) for i in act.iplus0]
    base_ineq = [inst.g[i].grad for i in act.ig]
    branches = []
    for p in parts:
        eq = list(base_eq)
        ineq = list(base_ineq)
        for i in p.beta1:
            eq.append(neg(inst.G[i]))
            ineq.append(neg(inst.H[i]))
        for i in p.beta2:
            ineq.append(neg(inst.G[i]))
            eq.append(neg(inst.H[i]))
        branches.append(Branch(HCone(tuple(eq), tuple(ineq), inst.n), 0, p))
    return BranchFamily(inst.n, tuple(branches))


def _mpvc_branches(inst: MpvcInstance, cap: int) -> BranchFamily:
    act = active_sets(inst)
    parts = enumerate_partitions(act.i00, cap)
    neg = lambda fd: tuple(-a for a in fd.grad)
    base_eq = [fd.grad for fd in inst.h]
    base_eq += [neg(inst.H[i]) for i in act.i0plus]
    base_ineq = [inst.g[i].grad for i in act.ig]
    base_ineq += [neg(inst.H[i]) for i in act.i0minus]
    base_ineq += [inst.G[i].grad for i in act.iplus0]
    branches = []
    for p in parts:
        eq = list(base_eq)
        ineq = list(base_ineq)
        for i in p.beta1:  # H-row tight, G-row free
            eq.append(neg(inst.H[i]))
        for i in p.beta2:  # both rows nonpositive
            ineq.append(neg(inst.H[i]))
            ineq.append(inst.G[i].grad)
        branches.append(Branch(HCone(tuple(eq), tuple(ineq), inst.n), 0, p))
    return BranchFamily(inst.n, tuple(branches))


def _ge_branches(inst: GeInstance, cap: int) -> BranchFamily:
    """Preimage pieces indexed by subsets of the degenerate active set.

    Direction (u, v) lies in the piece for beta when u is tangent to C,
    v satisfies the critical-cone rows pinned on beta, and
    -Gx u - Gy v - Hess v is a valid combination of active gradients
    (the combination coefficients are the auxiliary coordinates).
    """
    from .ge import multiplier_polytope, hessian_shift

    mp = multiplier_polytope(inst)
    shift = hessian_shift(inst)
    izero = mp.izero
    if 2 ** len(izero) > cap:
        raise BranchLimitExceeded(2 ** len(izero), cap)
    n, m = inst.n, inst.m
    act = mp.active
    base = n + m
    width = base + len(act)
    branches = []
    for mask in range(2 ** len(izero)):
        beta = tuple(i for b, i in enumerate(izero) if mask >> b & 1)
        eq_rows, ineq_rows = [], []
        for row in inst.tc.eq:
            eq_rows.append(tuple(row) + (ZERO,) * (width - n))
        for row in inst.tc.ineq:
            ineq_rows.append(tuple(row) + (ZERO,) * (width - n))
        for i in act:
            grad_row = (ZERO,) * n + tuple(inst.g[i].grad) + (ZERO,) * len(act)
            if i in mp.iplus or i in beta:
                eq_rows.append(grad_row)
            else:
                ineq_rows.append(grad_row)
        # -Gx u - Gy v - shift v = sum over (iplus | beta) of mu_i grad g_i
        for r in range(m):
            row = [ZERO] * width
            for j in range(n):
                row[j] = -inst.gx[r][j]
            for j in range(m):
                row[n + j] = -inst.gy[r][j] - shift[r][j]
            for k, i in enumerate(act):
                row[base + k] = -inst.g[i].grad[r] if (i in mp.iplus or i in beta) else ZERO
            eq_rows.append(tuple(row))
        for k, i in enumerate(act):
            if i in beta:
                ineq_rows.append(tuple(-ONE if c == base + k else ZERO for c in range(width)))
            elif i not in mp.iplus:
                eq_rows.append(tuple(ONE if c == base + k else ZERO for c in range(width)))
        branches.append(
            Branch(HCone(tuple(eq_rows), tuple(ineq_rows), width), len(act), beta)
        )
    return BranchFamily(base, tuple(branches))


def b_stationary(inst, cap: int = DEFAULT_CAP) -> Certificate:
    """No-descent check over every branch of the linearized cone."""
    fam = linearized_branches(inst, cap)
    f_grad = inst.f_grad
    assumptions = (
        "verdict is relative to the linearized cone; equals the no-descent "
        "property under GGCQ",
        "GGCQ asserted" if inst.ggcq_asserted else "GGCQ assumed (not verifiable from point data)",
    )
    for k, branch in enumerate(fam.branches):
        c = tuple(f_grad) + zeros(branch.aux)
        eq, ub = branch.cone.as_system()
        res = solve_lp(c, eq, ub, sense="min")
        if res.status == "unbounded":
            u = res.ray[: fam.dim]
            if dot(f_grad, u) >= 0 or not branch.contains(u):
                raise InternalError("descent direction failed re-verification")
            return Certificate(
                "b",
                False,
                refutation=("descent-direction", u),
                assumptions=assumptions,
                detail={"branch": branch.label, "descent": u},
            )
        if res.value != 0:
            raise InternalError("cone branch optimum must be zero when bounded")
    return Certificate("b", True, assumptions=assumptions, detail={"branches": len(fam.branches)})


# ---------------------------------------------------------------------------
# seeded random instances (affine data, origin as reference point)
# ---------------------------------------------------------------------------


def _rand_grad(rng: random.Random, n: int) -> Vec:
    return vec([rng.randint(-2, 2) for _ in range(n)])


def _inactive_value(rng: random.Random) -> object:
    return rat(rng.randint(1, 3))


def random_mpcc(seed: int, pattern=None, n: int | None = None, mode: str = "random") -> MpccInstance:
    """Deterministic affine instance with a prescribed pair pattern.

    pattern entries: "0+", "00", "+0" (at most three "00").  mode "s"
    builds the objective from a regular-normal-cone multiplier, mode
    "m" from a limiting one with a negative biactive entry, "random"
    draws it freely.
    """
    rng = random.Random(f"mpcc:{seed}")
    n = n if n is not None else rng.randint(2, 6)
    if pattern is None:
        m_c = rng.randint(1, 4)
        slots = ["0+", "00", "+0"]
        pattern = []
        biactive = 0
        for _ in range(m_c):
            choice = rng.choice(slots)
            if choice == "00" and biactive == 3:
                choice = "0+"
            biactive += choice == "00"
            pattern.append(choice)
    m_e = rng.randint(0, 2)
    m_i = rng.randint(0, 4)
    h = tuple(FunData(ZERO, _rand_grad(rng, n)) for _ in range(m_e))
    g = []
    for _ in range(m_i):
        active = rng.random() < 0.5
        g.append(FunData(ZERO if active else -_inactive_value(rng), _rand_grad(rng, n)))
    G, H = [], []
    for code in pattern:
        gv = ZERO if code[0] == "0" else _inactive_value(rng)
        hv = ZERO if code[1] == "0" else _inactive_value(rng)
        G.append(FunData(gv, _rand_grad(rng, n)))
        H.append(FunData(hv, _rand_grad(rng, n)))
    f_grad = _objective(rng, n, mode, h, g, G, H, tuple(pattern), mpcc=True)
    return MpccInstance(n, f_grad, h, tuple(g), tuple(G), tuple(H), ggcq_asserted=True)


def random_mpvc(seed: int, pattern=None, n: int | None = None, mode: str = "random") -> MpvcInstance:
    """pattern entries: "0-", "00", "0+", "+0", "+-" (H sign first)."""
    rng = random.Random(f"mpvc:{seed}")
    n = n if n is not None else rng.randint(2, 6)
    if pattern is None:
        m_v = rng.randint(1, 4)
        slots = ["0-", "00", "0+", "+0", "+-"]
        pattern = []
        biactive = 0
        for _ in range(m_v):
            choice = rng.choice(slots)
            if choice == "00" and biactive == 3:
                choice = "0-"
            biactive += choice == "00"
            pattern.append(choice)
    m_e = rng.randint(0, 2)
    m_i = rng.randint(0, 4)
    h = tuple(FunData(ZERO, _rand_grad(rng, n)) for _ in range(m_e))
    g = []
    for _ in range(m_i):
        active = rng.random() < 0.5
        g.append(FunData(ZERO if active else -_inactive_value(rng), _rand_grad(rng, n)))
    G, H = [], []
    for code in pattern:
        hv = ZERO if code[0] == "0" else _inactive_value(rng)
        if code[1] == "0":
            gv = ZERO
        elif code[1] == "-":
            gv = -_inactive_value(rng)
        else:
            gv = _inactive_value(rng)
        H.append(FunData(hv, _rand_grad(rng, n)))
        G.append(FunData(gv, _rand_grad(rng, n)))
    f_grad = _objective(rng, n, mode, h, g, G, H, tuple(pattern), mpcc=False)
    return MpvcInstance(n, f_grad, h, tuple(g), tuple(G), tuple(H), ggcq_asserted=True)


def _objective(rng, n, mode, h, g, G, H, pattern, mpcc: bool) -> Vec:
    if mode == "random":
        return _rand_grad(rng, n)
    acc = [ZERO] * n

    def add(grad, coeff):
        for j in range(n):
            acc[j] += coeff * grad[j]

    for fd in h:
        add(fd.grad, rat(rng.randint(-2, 2)))
    for fd in g:
        if fd.value == 0:
            add(fd.grad, rat(rng.randint(0, 2)))
    for code, gG, gH in zip(pattern, G, H):
        if mpcc:
            lam_g = lam_h = ZERO
            if code == "0+":
                lam_g = rat(rng.randint(-2, 2))
            elif code == "+0":
                lam_h = rat(rng.randint(-2, 2))
            elif mode == "s":
                lam_g, lam_h = rat(rng.randint(0, 2)), rat(rng.randint(0, 2))
            else:  # limiting cone: one factor vanishes or both positive
                if rng.random() < 0.5:
                    lam_g, lam_h = ZERO, rat(rng.randint(-2, 2))
                else:
                    lam_g, lam_h = rat(rng.randint(-2, 2)), ZERO
            add(gG.grad, -lam_g)
            add(gH.grad, -lam_h)
        else:
            lam_g = lam_h = ZERO
            if code == "0-":
                lam_h = rat(rng.randint(0, 2))
            elif code == "0+":
                lam_h = rat(rng.randint(-2, 2))
            elif code == "+0":
                lam_g = rat(rng.randint(0, 2))
            elif code == "00":
                if mode == "s":
                    lam_h = rat(rng.randint(0, 2))
                else:
                    if rng.random() < 0.5:
                        lam_h = rat(rng.randint(-2, 2))
                    else:
                        lam_g = rat(rng.randint(0, 2))
            add(gG.grad, lam_g)
            add(gH.grad, -lam_h)
    return tuple(-a for a in acc)


def implication_audit(inst, cap: int = DEFAULT_CAP, precomputed: dict | None = None):
    """Check every implication edge between the computed verdicts.

    Returns a list of violated edges; any nonempty result indicates a
    defect in the library, not a property of the instance.
    """
    from . import mpcc as mpcc_mod
    from . import mpvc as mpvc_mod

    is_mpcc = isinstance(inst, MpccInstance)
    mod = mpcc_mod if is_mpcc else mpvc_mod
    act = active_sets(inst)
    parts = enumerate_partitions(act.i00, cap)
    certs = precomputed or {}
    s = certs.get("s") or mod.check_s(inst)
    m = certs.get("m") or mod.check_m(inst, cap)
    q = certs.get("q") or {p: mod.check_q(inst, p) for p in parts}
    qm = certs.get("qm") or (
        mod.check_qm(inst, cap=cap) if is_mpcc else mod.check_qm(inst, cap)
    )
    b = certs.get("b_oracle") or b_stationary(inst, cap)

    q_all = all(c.verdict for c in q.values())
    q_any = any(c.verdict for c in q.values())
    violated = []
    if s.verdict and not b.verdict:
        violated.append("strong => no-descent")
    if s.verdict and not m.verdict:
        violated.append("strong => limiting")
    if s.verdict and not qm.verdict:
        violated.append("strong => directional-limiting")
    if s.verdict and not q_all:
        violated.append("strong => directional for every partition")
    if b.verdict and not q_all:
        violated.append("no-descent => directional for every partition")
    if b.verdict and not qm.verdict:
        violated.append("no-descent => directional-limiting")
    if qm.verdict and not m.verdict:
        violated.append("directional-limiting => limiting")
    if qm.verdict and not q_any:
        violated.append("directional-limiting => directional for some partition")
    for p in parts:
        swapped = Partition(p.beta2, p.beta1)
        if swapped in q and q[p].verdict != q[swapped].verdict:
            violated.append(f"directional symmetry at {p}")
    if is_mpcc:
        if mod.check_licq(inst) and q_any and not s.verdict:
            violated.append("independence + directional => strong")
        for p in parts:
            if q[p].verdict and mod.qual_sign_products(inst, p).ok and not s.verdict:
                violated.append(f"sign-product qualification promotion at {p}")
    else:
        full = Partition(tuple(act.i00), ())
        if b.verdict and full in q and not q[full].verdict:
            violated.append("no-descent => directional at the full-first-block partition")
        for p in parts:
            if q[p].verdict and mod.qual_exactness(inst, p).ok and not s.verdict:
                violated.append(f"exactness qualification promotion at {p}")
    return violated


def random_ge(seed: int, mode: str = "random", coordinate_tc: bool = False) -> GeInstance:
    """Zero-curvature instance with the coordinate orthant constraint
    block (g_i(y) = y_i), random Jacobian blocks, and a polyhedral
    tangent cone for the parameter set.

    With coordinate_tc the tangent cone uses signed unit rows only, so
    the limiting-cone branch family is available in halfspace form.
    """
    rng = random.Random(f"ge:{seed}")
    n = rng.randint(1, 3)
    m = rng.randint(1, 3)
    zero_h = tuple(tuple(ZERO for _ in range(m)) for _ in range(m))
    pattern = [rng.choice(["off", "plus", "zero"]) for _ in range(m)]
    if all(p == "off" for p in pattern):
        pattern[rng.randrange(m)] = "zero"
    gees, ystar = [], []
    for i, code in enumerate(pattern):
        yval = ZERO if code != "off" else rat(-rng.randint(1, 2))
        grad = tuple(ONE if j == i else ZERO for j in range(m))
        gees.append(GeConstraint(yval, grad, zero_h))
        ystar.append(rat(rng.randint(1, 2)) if code == "plus" else ZERO)
    gx = tuple(tuple(rat(rng.randint(-2, 2)) for _ in range(n)) for _ in range(m))
    gy = tuple(tuple(rat(rng.randint(-2, 2)) for _ in range(m)) for _ in range(m))
    eq_rows, ineq_rows = [], []
    if coordinate_tc:
        for j in range(n):
            kind = rng.choice(["free", "half", "line"])
            unit = tuple(ONE if c == j else ZERO for c in range(n))
            if kind == "half":
                ineq_rows.append(unit)
            elif kind == "line":
                eq_rows.append(unit)
    else:
        for _ in range(rng.randint(0, 2)):
            ineq_rows.append(tuple(rat(rng.randint(-2, 2)) for _ in range(n)))
        if rng.random() < 0.3:
            eq_rows.append(tuple(rat(rng.randint(-2, 2)) for _ in range(n)))
    tc = HCone(tuple(eq_rows), tuple(ineq_rows), n)

    if mode == "random":
        f_grad = tuple(rat(rng.randint(-2, 2)) for _ in range(n + m))
    else:  # build the gradient from a strong multiplier
        iplus = [i for i, c in enumerate(pattern) if c == "plus"]
        izero = [i for i, c in enumerate(pattern) if c == "zero"]
        w = [ZERO] * m
        mu = [ZERO] * m
        for i in range(m):
            if i in iplus:
                mu[i] = rat(rng.randint(-2, 2))
            elif i in izero:
                w[i] = rat(-rng.randint(0, 2))
                mu[i] = rat(rng.randint(0, 2))
            else:
                w[i] = rat(rng.randint(-2, 2))
        eta = [ZERO] * n
        for row in ineq_rows:
            c = rat(rng.randint(0, 2))
            for j in range(n):
                eta[j] += c * row[j]
        for row in eq_rows:
            c = rat(rng.randint(-2, 2))
            for j in range(n):
                eta[j] += c * row[j]
        fx = [ZERO] * n
        for j in range(n):
            fx[j] = eta[j]
            for r in range(m):
                fx[j] -= gx[r][j] * w[r]
        fy = [ZERO] * m
        for j in range(m):
            fy[j] = mu[j]
            for r in range(m):
                fy[j] -= gy[r][j] * w[r]
        f_grad = tuple(-a for a in fx) + tuple(-a for a in fy)
    return GeInstance(
        n=n,
        m=m,
        f_grad=f_grad,
        gx=gx,
        gy=gy,
        g_val=tuple(-a for a in ystar),
        g=tuple(gees),
        tc=tc,
        ggcq_asserted=True,
    )
