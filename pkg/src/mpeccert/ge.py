"""Stationarity certification for normal-cone generalized equations.

The constraints are 0 in G(x, y) + NhatGamma(y) with x in C and Gamma
cut out by twice-differentiable inequalities g_i(y) <= 0.  All checks
work at a fixed point from: the two Jacobian blocks of G, the active
gradients and Hessians of g, and the tangent cone to C.

Central objects:

* the multiplier polytope {lam >= 0 on the active set, 0 off it,
  grad g(y)^T lam = ystar} with ystar = -G(x, y); its support split
  into indices that some multiplier makes positive and the degenerate
  rest,
* the critical cone (active gradients tight on the positive part,
  nonpositive on the degenerate part),
* a fixed base multiplier lam_bar feeding the curvature term
  Hess(lam_bar . g); the directional multiplier map is assumed (or
  partially verified) constant, and every report records how lam_bar
  was chosen,
* per-subset cones over the degenerate set, giving the directional
  stationarity tests, each decided by an explicit multiplier system
  and independently by two polar-image memberships.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .certificates import Certificate, GeMultiplier
from .cones import (
    GCone,
    HCone,
    implicit_rows,
    lineality,
    member,
    polar,
    relative_interior_point,
    span_basis,
)
from .errors import (
    ConstancyNotEstablished,
    GeInfeasibleAtPoint,
    InternalError,
    LambdaBarUnavailable,
    MfcqViolated,
    SubsetLimitExceeded,
)
from .instances import DEFAULT_CAP, GeInstance
from . import linalg
from .lp import LinearSystem, find_feasible, solve_lp, strict_feasible
from .rationals import ZERO, ONE, Mat, Rat, Vec, add, dot, matvec, sub, vec, zeros


# ---------------------------------------------------------------------------
# multiplier polytope, critical cone, base multiplier
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiplierPolytope:
    active: tuple  # indices with g_i(ybar) = 0
    iplus: tuple  # active indices some multiplier makes positive
    izero: tuple  # the degenerate remainder
    eq: LinearSystem  # grad g(ybar)^T lam = ystar, over all l coordinates
    ub: LinearSystem  # sign and support rows
    sample: Vec  # one feasible multiplier


def _polytope_systems(inst: GeInstance):
    l, m = len(inst.g), inst.m
    rows = tuple(tuple(inst.g[i].grad[j] for i in range(l)) for j in range(m))
    eq = LinearSystem(rows, inst.ystar)
    ub_rows, rhs = [], []
    for i in range(l):
        e = [ZERO] * l
        e[i] = -ONE
        ub_rows.append(tuple(e))
        rhs.append(ZERO)
        if i not in inst.active:
            e2 = [ZERO] * l
            e2[i] = ONE
            ub_rows.append(tuple(e2))
            rhs.append(ZERO)
    return eq, LinearSystem(tuple(ub_rows), vec(rhs))


@lru_cache(maxsize=256)
def multiplier_polytope(inst: GeInstance) -> MultiplierPolytope:
    act = inst.active
    grad_rows = tuple(inst.g[i].grad for i in act)
    mfcq = strict_feasible(
        LinearSystem.empty(),
        LinearSystem(grad_rows, zeros(len(grad_rows))),
        tuple(range(len(grad_rows))),
    )
    if not mfcq.ok:
        raise MfcqViolated("no direction strictly decreases every active inequality")
    eq, ub = _polytope_systems(inst)
    feas = find_feasible(eq, ub)
    if not feas.optimal:
        raise GeInfeasibleAtPoint("the multiplier polytope is empty")
    iplus = []
    l = len(inst.g)
    for i in act:
        c = [ZERO] * l
        c[i] = ONE
        res = solve_lp(tuple(c), eq, ub, sense="max")
        if res.status == "unbounded":
            raise InternalError("multiplier polytope unbounded despite MFCQ")
        if res.value > 0:
            iplus.append(i)
    izero = tuple(i for i in act if i not in iplus)
    mp = MultiplierPolytope(act, tuple(iplus), izero, eq, ub, feas.point)
    _verify_degenerate_support(inst, mp)
    return mp


def _verify_degenerate_support(inst: GeInstance, mp: MultiplierPolytope):
    """No nonzero combination of active gradients with nonnegative
    weights on the degenerate set puts positive weight there."""
    l = len(inst.g)
    # combination rows: sum_i gamma_i grad g_i = 0 over active support
    comb = tuple(
        tuple(inst.g[i].grad[j] if i in mp.active else ZERO for i in range(l))
        for j in range(inst.m)
    )
    support = tuple(
        tuple(ONE if i == k else ZERO for i in range(l))
        for k in range(l)
        if k not in mp.active
    )
    eq = LinearSystem(comb + support, zeros(inst.m + len(support)))
    sign_rows = tuple(
        tuple(-ONE if i == k else ZERO for i in range(l)) for k in mp.izero
    )
    for pos in range(len(mp.izero)):
        res = strict_feasible(eq, LinearSystem(sign_rows, zeros(len(sign_rows))), (pos,))
        if res.ok:
            raise InternalError("degenerate-support property failed; index split is wrong")


def critical_cone(inst: GeInstance) -> HCone:
    mp = multiplier_polytope(inst)
    eq = tuple(inst.g[i].grad for i in mp.iplus)
    ineq = tuple(inst.g[i].grad for i in mp.izero)
    return HCone(eq, ineq, inst.m)


def critical_cone_polar(inst: GeInstance) -> GCone:
    """Generator form straight from the active gradients."""
    mp = multiplier_polytope(inst)
    return GCone(
        tuple(inst.g[i].grad for i in mp.izero),
        tuple(inst.g[i].grad for i in mp.iplus),
        inst.m,
    )


def hessian_shift(inst: GeInstance, lam: Vec | None = None) -> Mat:
    """Hess(lam . g)(ybar); defaults to the selected base multiplier."""
    if lam is None:
        lam = lambda_bar(inst)[0]
    m = inst.m
    out = [[ZERO] * m for _ in range(m)]
    for li, gc in zip(lam, inst.g):
        if li == 0:
            continue
        for r in range(m):
            for c in range(m):
                out[r][c] += li * gc.hess[r][c]
    return tuple(tuple(r) for r in out)


@dataclass(frozen=True)
class DirectionalMultipliers:
    direction: Vec
    objective: Vec  # linear coefficients v^T Hess g_i v per constraint
    value: Rat
    maximizer: Vec
    tight: tuple  # coordinates pinned to zero on the whole argmax face


def directional_multipliers(inst: GeInstance, v: Vec) -> DirectionalMultipliers:
    """Maximisers of the curvature form over the multiplier polytope.

    The objective lam -> v^T Hess(lam . g) v is linear in lam with
    coefficient v^T Hess g_i v on coordinate i.  `tight` describes the
    argmax face: the active coordinates whose sign constraint binds at
    every maximiser.
    """
    if not critical_cone(inst).contains(v):
        raise ValueError("direction must lie in the critical cone")
    mp = multiplier_polytope(inst)
    c = tuple(dot(v, matvec(gc.hess, v)) for gc in inst.g)
    res = solve_lp(c, mp.eq, mp.ub, sense="max")
    if res.status != "optimal":
        raise InternalError("directional objective must attain its max on the polytope")
    face_eq = LinearSystem(mp.eq.a + (vec(c),), mp.eq.b + (res.value,))
    tight = []
    l = len(inst.g)
    for i in mp.active:
        ci = [ZERO] * l
        ci[i] = ONE
        top = solve_lp(tuple(ci), face_eq, mp.ub, sense="max")
        if top.status == "optimal" and top.value == 0:
            tight.append(i)
    return DirectionalMultipliers(vec(v), c, res.value, res.point, tuple(tight))


def _face_equal(inst: GeInstance, d1: DirectionalMultipliers, d2: DirectionalMultipliers) -> bool:
    """The two argmax faces coincide: each face is flat for the other
    objective, at the other optimal value."""
    mp = multiplier_polytope(inst)
    for a, b in ((d1, d2), (d2, d1)):
        face_eq = LinearSystem(mp.eq.a + (a.objective,), mp.eq.b + (a.value,))
        for sense in ("min", "max"):
            res = solve_lp(b.objective, face_eq, mp.ub, sense=sense)
            if res.status != "optimal" or res.value != b.value:
                return False
    return True


def _primitive(v: Vec) -> Vec:
    """Scale a rational direction to a canonical integer primitive."""
    from gmpy2 import gcd

    nums = [x.numerator for x in v]
    dens = [x.denominator for x in v]
    scale = ONE
    for d in dens:
        scale *= d
    w = [x * scale for x in v]
    g = ZERO
    for x in w:
        g = gcd(g, x.numerator)
    if g == 0:
        return vec([0] * len(v))
    return tuple(x / g for x in w)


def extreme_directions(cone: HCone, cap: int = DEFAULT_CAP) -> tuple:
    """Extreme rays of the pointed part plus a lineality basis, exact.

    Candidate rays come from active-row subsets that cut the span down
    to one dimension; each candidate must satisfy the cone rows.  Used
    only by the necessary constancy test, never on large systems.
    """
    from itertools import combinations

    lin = lineality(cone)
    span = span_basis(cone)
    point_dim = len(span) - len(lin)
    if point_dim <= 0:
        return tuple(lin)
    rows = list(cone.ineq)
    if 2 ** len(rows) > cap:
        raise SubsetLimitExceeded(2 ** len(rows), cap)
    base = list(cone.eq) + list(lin)  # pin lineality to isolate pointed rays
    out = []
    seen = set()
    for r in range(len(rows) + 1):
        for sub_rows in combinations(range(len(rows)), r):
            stack = base + [rows[i] for i in sub_rows]
            null = linalg.nullspace(tuple(stack), cone.dim)
            if len(null) != 1:
                continue
            for cand in (null[0], tuple(-a for a in null[0])):
                if cone.contains(cand):
                    key = _primitive(cand)
                    if key not in seen and any(a != 0 for a in key):
                        seen.add(key)
                        out.append(key)
    return tuple(lin) + tuple(out)


def constancy_status(inst: GeInstance, cap: int = DEFAULT_CAP) -> tuple:
    """How the constant-directional-multiplier assumption is supported.

    Returns (status, detail); status is one of "zero-curvature",
    "singleton", "trivial-critical-cone", "user-asserted",
    "necessary-test-passed", "failed".
    """
    if all(all(all(a == 0 for a in row) for row in gc.hess) for gc in inst.g):
        return "zero-curvature", "all Hessians vanish"
    lo, hi = _polytope_box(inst)
    if lo == hi:
        return "singleton", "the multiplier polytope is a single point"
    kk = critical_cone(inst)
    if not span_basis(kk):
        return "trivial-critical-cone", "the critical cone is the origin"
    if inst.lambda_bar is not None:
        return "user-asserted", "a base multiplier was supplied with the instance"
    dirs = [d for d in extreme_directions(kk, cap) if any(a != 0 for a in d)]
    ri = relative_interior_point(kk)
    if any(a != 0 for a in ri):
        dirs.append(ri)
    faces = [directional_multipliers(inst, v) for v in dirs]
    for other in faces[1:]:
        if not _face_equal(inst, faces[0], other):
            return "failed", "argmax faces differ across sampled critical directions"
    return "necessary-test-passed", f"{len(faces)} critical directions share one argmax face"


def _polytope_box(inst: GeInstance):
    mp = multiplier_polytope(inst)
    l = len(inst.g)
    lo, hi = [], []
    for i in range(l):
        c = [ZERO] * l
        c[i] = ONE
        lo.append(solve_lp(tuple(c), mp.eq, mp.ub, sense="min").value)
        hi.append(solve_lp(tuple(c), mp.eq, mp.ub, sense="max").value)
    return tuple(lo), tuple(hi)


@lru_cache(maxsize=256)
def lambda_bar(inst: GeInstance) -> tuple:
    """The base multiplier and a note on how it was selected."""
    mp = multiplier_polytope(inst)
    l = len(inst.g)
    if inst.lambda_bar is not None:
        lam = inst.lambda_bar
        if any(dot(r, lam) != b for r, b in zip(mp.eq.a, mp.eq.b)) or any(
            dot(r, lam) > b for r, b in zip(mp.ub.a, mp.ub.b)
        ):
            raise LambdaBarUnavailable("supplied base multiplier is not in the polytope")
        return lam, "supplied with the instance"
    lo, hi = _polytope_box(inst)
    if lo == hi:
        return vec(lo), "unique multiplier"
    v0 = relative_interior_point(critical_cone(inst))
    if any(a != 0 for a in v0):
        dm = directional_multipliers(inst, v0)
        return dm.maximizer, "directional maximizer at an interior critical direction"
    # trivial critical cone: canonical lexicographic-minimal multiplier
    eq, ub = mp.eq, mp.ub
    lam = []
    for i in range(l):
        c = [ZERO] * l
        c[i] = ONE
        res = solve_lp(tuple(c), eq, ub, sense="min")
        lam.append(res.value)
        eq = LinearSystem(eq.a + (tuple(c),), eq.b + (res.value,))
    return vec(lam), "lexicographically minimal multiplier"


# ---------------------------------------------------------------------------
# subset cones over the degenerate active set
# ---------------------------------------------------------------------------


def k_beta(inst: GeInstance, beta: tuple) -> HCone:
    mp = multiplier_polytope(inst)
    eq = tuple(inst.g[i].grad for i in mp.iplus) + tuple(inst.g[i].grad for i in beta)
    ineq = tuple(inst.g[i].grad for i in mp.izero if i not in beta)
    return HCone(eq, ineq, inst.m)


def k_beta_star(inst: GeInstance, beta: tuple) -> GCone:
    mp = multiplier_polytope(inst)
    return GCone(
        tuple(inst.g[i].grad for i in beta),
        tuple(inst.g[i].grad for i in mp.iplus),
        inst.m,
    )


@dataclass(frozen=True)
class QgeCone:
    """One subset cone: primal pieces, both polar factors, and the
    curvature change of variables baked into membership tests."""

    beta: tuple
    k: HCone
    k_star: GCone
    k_polar: GCone  # polar of k, generator form
    k_star_polar: HCone  # polar of k_star, halfspace form
    lam: Vec
    shift: Mat


def build_q_cone(inst: GeInstance, beta: tuple) -> QgeCone:
    mp = multiplier_polytope(inst)
    lam, _ = lambda_bar(inst)
    kb = k_beta(inst, beta)
    kbs = k_beta_star(inst, beta)
    k_polar = GCone(
        tuple(inst.g[i].grad for i in mp.izero if i not in beta),
        tuple(inst.g[i].grad for i in mp.iplus) + tuple(inst.g[i].grad for i in beta),
        inst.m,
    )
    k_star_polar = HCone(
        tuple(inst.g[i].grad for i in mp.iplus),
        tuple(inst.g[i].grad for i in beta),
        inst.m,
    )
    return QgeCone(tuple(beta), kb, kbs, k_polar, k_star_polar, lam, hessian_shift(inst, lam))


def q_cone_contains(inst: GeInstance, qc: QgeCone, point: Vec) -> bool:
    """Primal membership of (u, v, v*) in the subset cone."""
    n, m = inst.n, inst.m
    u, v, vstar = point[:n], point[n : n + m], point[n + m :]
    if not inst.tc.contains(u) or not qc.k.contains(v):
        return False
    shifted = sub(vstar, matvec(qc.shift, v))
    return member(qc.k_star, shifted).inside


def q_polar_contains(inst: GeInstance, qc: QgeCone, lam_vec: Vec) -> bool:
    """Dual membership of (eta, q*, q) in the polar of the subset cone."""
    n, m = inst.n, inst.m
    eta, qstar, q = lam_vec[:n], lam_vec[n : n + m], lam_vec[n + m :]
    if not member(polar(inst.tc), eta).inside:
        return False
    if not qc.k_star_polar.contains(q):
        return False
    return member(qc.k_polar, add(qstar, matvec(qc.shift, q))).inside


@dataclass(frozen=True)
class BgeFamily:
    members: tuple  # subsets admitting a strictly-complementary direction
    closures: dict  # rejected subset -> its closure inside the family


def bge_family(inst: GeInstance, cap: int = DEFAULT_CAP) -> BgeFamily:
    mp = multiplier_polytope(inst)
    k = len(mp.izero)
    if 2**k > cap:
        raise SubsetLimitExceeded(2**k, cap)
    members, closures = [], {}
    for mask in range(2**k):
        beta = tuple(i for b, i in enumerate(mp.izero) if mask >> b & 1)
        eq_rows = tuple(inst.g[i].grad for i in mp.iplus) + tuple(
            inst.g[i].grad for i in beta
        )
        strict_rows = tuple(inst.g[i].grad for i in mp.izero if i not in beta)
        res = strict_feasible(
            LinearSystem(eq_rows, zeros(len(eq_rows))),
            LinearSystem(strict_rows, zeros(len(strict_rows))),
            tuple(range(len(strict_rows))),
        )
        if res.ok:
            members.append(beta)
        else:
            kb = k_beta(inst, beta)
            extra = [i for pos, i in enumerate([j for j in mp.izero if j not in beta])
                     if pos in implicit_rows(kb)]
            closures[beta] = tuple(sorted(set(beta) | set(extra)))
    if () not in members or tuple(mp.izero) not in members:
        raise InternalError("the empty and full subsets must always be admissible")
    return BgeFamily(tuple(members), closures)


def admissible_pairs(inst: GeInstance, cap: int = DEFAULT_CAP) -> tuple:
    """Ordered pairs from the admissible family covering the degenerate set."""
    fam = bge_family(inst, cap)
    mp = multiplier_polytope(inst)
    full = set(mp.izero)
    out = []
    for b1 in fam.members:
        for b2 in fam.members:
            if set(b1) | set(b2) == full:
                out.append((b1, b2))
    return tuple(out)


# ---------------------------------------------------------------------------
# stationarity checks
# ---------------------------------------------------------------------------


def _assumptions(inst: GeInstance, extra=()) -> tuple:
    base = [
        "GGCQ asserted" if inst.ggcq_asserted else "GGCQ assumed (not verifiable from point data)",
        "tangent cone to the parameter set supplied as instance data",
    ]
    lam, how = lambda_bar(inst)
    base.append(f"base multiplier: {how}")
    return tuple(base) + tuple(extra)


def _nc_generators(inst: GeInstance):
    """Normal cone to the parameter set: polar of the supplied tangent cone."""
    return polar(inst.tc)


def check_s(inst: GeInstance) -> Certificate:
    """-grad f realizable through the regular normal cone of the graph,
    with the curvature shift at the base multiplier."""
    mp = multiplier_polytope(inst)
    lam, _ = lambda_bar(inst)
    shift = hessian_shift(inst, lam)
    n, m = inst.n, inst.m
    nc = _nc_generators(inst)
    nr, nl = len(nc.rays), len(nc.lin)
    la = len(mp.active)
    # variables: w (m) | mu (active count) | a (nc rays) | b (nc lin)
    width = m + la + nr + nl
    eq_rows, eq_rhs = [], []
    neg_f = tuple(-a for a in inst.f_grad)
    for j in range(n):  # c* - Gx^T w = -grad_x f
        row = [ZERO] * width
        for r in range(m):
            row[r] = -inst.gx[r][j]
        for t, ray in enumerate(nc.rays):
            row[m + la + t] = ray[j]
        for t, lv in enumerate(nc.lin):
            row[m + la + nr + t] = lv[j]
        eq_rows.append(tuple(row))
        eq_rhs.append(neg_f[j])
    for j in range(m):  # -Gy^T w - shift w + sum mu_i grad g_i = -grad_y f
        row = [ZERO] * width
        for r in range(m):
            row[r] = -inst.gy[r][j] - shift[j][r]
        for t, i in enumerate(mp.active):
            row[m + t] = inst.g[i].grad[j]
        eq_rows.append(tuple(row))
        eq_rhs.append(neg_f[n + j])
    ineq_rows = []
    for i in mp.iplus:
        r = [ZERO] * width
        for j in range(m):
            r[j] = inst.g[i].grad[j]
        eq_rows.append(tuple(r))  # critical cone equalities on w
        eq_rhs.append(ZERO)
    for i in mp.izero:
        r = [ZERO] * width
        for j in range(m):
            r[j] = inst.g[i].grad[j]
        ineq_rows.append(tuple(r))
    for t, i in enumerate(mp.active):
        if i in mp.izero:
            ineq_rows.append(tuple(-ONE if c == m + t else ZERO for c in range(width)))
    for t in range(nr):
        ineq_rows.append(
            tuple(-ONE if c == m + la + t else ZERO for c in range(width))
        )
    res = find_feasible(
        LinearSystem(tuple(eq_rows), vec(eq_rhs)),
        LinearSystem(tuple(ineq_rows), zeros(len(ineq_rows))),
    )
    if not res.optimal:
        return Certificate("s", False, refutation=res.farkas, assumptions=_assumptions(inst))
    w = res.point[:m]
    mu = res.point[m : m + la]
    wstar = [ZERO] * m
    for j in range(m):
        wstar[j] = -dot(tuple(shift[j][r] for r in range(m)), w)
        for t, i in enumerate(mp.active):
            wstar[j] += mu[t] * inst.g[i].grad[j]
    eta = [ZERO] * n
    for t, ray in enumerate(nc.rays):
        for j in range(n):
            eta[j] += res.point[m + la + t] * ray[j]
    for t, lv in enumerate(nc.lin):
        for j in range(n):
            eta[j] += res.point[m + la + nr + t] * lv[j]
    gm = GeMultiplier(tuple(eta), tuple(wstar), tuple(w))
    _verify_s_multiplier(inst, gm)
    return Certificate("s", True, multiplier=gm, assumptions=_assumptions(inst))


def multiplier_image_ge(inst: GeInstance, gm: GeMultiplier) -> Vec:
    """(eta - Gx^T q, q* - Gy^T q) in gradient space."""
    n, m = inst.n, inst.m
    x_part = list(gm.eta_c)
    for j in range(n):
        for r in range(m):
            x_part[j] -= inst.gx[r][j] * gm.q[r]
    y_part = list(gm.qstar)
    for j in range(m):
        for r in range(m):
            y_part[j] -= inst.gy[r][j] * gm.q[r]
    return tuple(x_part) + tuple(y_part)


def _verify_s_multiplier(inst: GeInstance, gm: GeMultiplier):
    if multiplier_image_ge(inst, gm) != tuple(-a for a in inst.f_grad):
        raise InternalError("ge strong multiplier fails to realize the gradient")
    if not member(_nc_generators(inst), gm.eta_c).inside:
        raise InternalError("ge strong multiplier: parameter block outside the normal cone")
    if not critical_cone(inst).contains(gm.q):
        raise InternalError("ge strong multiplier: direction block outside the critical cone")
    shifted = add(gm.qstar, matvec(hessian_shift(inst), gm.q))
    if not member(critical_cone_polar(inst), shifted).inside:
        raise InternalError("ge strong multiplier: shifted block outside the polar")


# ---------------------------------------------------------------------------
# directional stationarity: explicit system and membership routes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _QgeLayout:
    n: int
    m: int
    la: int  # active count
    nr: int  # normal-cone rays
    nl: int  # normal-cone lineality
    width: int
    eta: int
    qstar: int
    q: int
    r: int
    mu_q: int
    mu_r: int
    a1: int
    b1: int
    a2: int
    b2: int


def _layout(inst: GeInstance) -> _QgeLayout:
    mp = multiplier_polytope(inst)
    nc = _nc_generators(inst)
    n, m, la = inst.n, inst.m, len(mp.active)
    nr, nl = len(nc.rays), len(nc.lin)
    eta = 0
    qstar = n
    q = n + m
    r = n + 2 * m
    mu_q = r + m
    mu_r = mu_q + la
    a1 = mu_r + la
    b1 = a1 + nr
    a2 = b1 + nl
    b2 = a2 + nr
    return _QgeLayout(n, m, la, nr, nl, b2 + nl, eta, qstar, q, r, mu_q, mu_r, a1, b1, a2, b2)


def _pair_system(inst: GeInstance, beta1: tuple, beta2: tuple):
    """The explicit multiplier system for one subset pair: realization
    rows, both curvature-shifted combination rows, the kernel-coupled
    inequalities, and two normal-cone memberships for the parameter block."""
    mp = multiplier_polytope(inst)
    lam, _ = lambda_bar(inst)
    shift = hessian_shift(inst, lam)
    nc = _nc_generators(inst)
    lay = _layout(inst)
    n, m, la, width = lay.n, lay.m, lay.la, lay.width
    neg_f = tuple(-a for a in inst.f_grad)
    eq_rows, eq_rhs = [], []

    for j in range(n):  # eta - Gx^T q = -grad_x f
        row = [ZERO] * width
        row[lay.eta + j] = ONE
        for c in range(m):
            row[lay.q + c] = -inst.gx[c][j]
        eq_rows.append(tuple(row))
        eq_rhs.append(neg_f[j])
    for j in range(m):  # q* - Gy^T q = -grad_y f
        row = [ZERO] * width
        row[lay.qstar + j] = ONE
        for c in range(m):
            row[lay.q + c] = -inst.gy[c][j]
        eq_rows.append(tuple(row))
        eq_rhs.append(neg_f[n + j])
    for j in range(m):  # q* + shift q = sum mu_q grad g
        row = [ZERO] * width
        row[lay.qstar + j] = ONE
        for c in range(m):
            row[lay.q + c] = shift[j][c]
        for t, i in enumerate(mp.active):
            row[lay.mu_q + t] = -inst.g[i].grad[j]
        eq_rows.append(tuple(row))
        eq_rhs.append(ZERO)
    for j in range(m):  # Gy^T r + shift r = sum mu_r grad g
        row = [ZERO] * width
        for c in range(m):
            row[lay.r + c] = inst.gy[c][j] + shift[j][c]
        for t, i in enumerate(mp.active):
            row[lay.mu_r + t] = -inst.g[i].grad[j]
        eq_rows.append(tuple(row))
        eq_rhs.append(ZERO)
    for i in mp.iplus:  # both direction blocks tight on the positive part
        for block in (lay.q, lay.r):
            row = [ZERO] * width
            for j in range(m):
                row[block + j] = inst.g[i].grad[j]
            eq_rows.append(tuple(row))
            eq_rhs.append(ZERO)
    for j in range(n):  # eta in the parameter normal cone
        row = [ZERO] * width
        row[lay.eta + j] = ONE
        for t, ray in enumerate(nc.rays):
            row[lay.a1 + t] = -ray[j]
        for t, lv in enumerate(nc.lin):
            row[lay.b1 + t] = -lv[j]
        eq_rows.append(tuple(row))
        eq_rhs.append(ZERO)
    for j in range(n):  # eta - Gx^T r in the parameter normal cone
        row = [ZERO] * width
        row[lay.eta + j] = ONE
        for c in range(m):
            row[lay.r + c] = -inst.gx[c][j]
        for t, ray in enumerate(nc.rays):
            row[lay.a2 + t] = -ray[j]
        for t, lv in enumerate(nc.lin):
            row[lay.b2 + t] = -lv[j]
        eq_rows.append(tuple(row))
        eq_rhs.append(ZERO)

    ineq_rows = []
    for i in beta1:  # first-block rows on q
        row = [ZERO] * width
        for j in range(m):
            row[lay.q + j] = inst.g[i].grad[j]
        ineq_rows.append(tuple(row))
    for t, i in enumerate(mp.active):
        if i in mp.izero and i not in beta1:
            ineq_rows.append(tuple(-ONE if c == lay.mu_q + t else ZERO for c in range(width)))
    for i in beta2:  # second-block rows on q - r
        row = [ZERO] * width
        for j in range(m):
            row[lay.q + j] = inst.g[i].grad[j]
            row[lay.r + j] = -inst.g[i].grad[j]
        ineq_rows.append(tuple(row))
    for t, i in enumerate(mp.active):
        if i in mp.izero and i not in beta2:
            row = [ZERO] * width
            row[lay.mu_r + t] = ONE
            row[lay.mu_q + t] = -ONE
            ineq_rows.append(tuple(row))
    for t in range(lay.nr):
        ineq_rows.append(tuple(-ONE if c == lay.a1 + t else ZERO for c in range(width)))
        ineq_rows.append(tuple(-ONE if c == lay.a2 + t else ZERO for c in range(width)))
    return lay, eq_rows, eq_rhs, ineq_rows


def _membership_route(inst: GeInstance, beta: tuple) -> bool:
    """-grad f in the image of the polar of one subset cone."""
    mp = multiplier_polytope(inst)
    lam, _ = lambda_bar(inst)
    shift = hessian_shift(inst, lam)
    nc = _nc_generators(inst)
    n, m, la = inst.n, inst.m, len(mp.active)
    nr, nl = len(nc.rays), len(nc.lin)
    width = n + m + la + nr + nl  # eta | w | mu | a | b
    neg_f = tuple(-a for a in inst.f_grad)
    eq_rows, eq_rhs = [], []
    for j in range(n):
        row = [ZERO] * width
        row[j] = ONE
        for c in range(m):
            row[n + c] = -inst.gx[c][j]
        eq_rows.append(tuple(row))
        eq_rhs.append(neg_f[j])
    for j in range(m):
        row = [ZERO] * width
        for c in range(m):
            row[n + c] = -inst.gy[c][j] - shift[j][c]
        for t, i in enumerate(mp.active):
            row[n + m + t] = inst.g[i].grad[j]
        eq_rows.append(tuple(row))
        eq_rhs.append(neg_f[n + j])
    for j in range(n):
        row = [ZERO] * width
        row[j] = ONE
        for t, ray in enumerate(nc.rays):
            row[n + m + la + t] = -ray[j]
        for t, lv in enumerate(nc.lin):
            row[n + m + la + nr + t] = -lv[j]
        eq_rows.append(tuple(row))
        eq_rhs.append(ZERO)
    for i in mp.iplus:
        row = [ZERO] * width
        for j in range(m):
            row[n + j] = inst.g[i].grad[j]
        eq_rows.append(tuple(row))
        eq_rhs.append(ZERO)
    ineq_rows = []
    for i in beta:
        row = [ZERO] * width
        for j in range(m):
            row[n + j] = inst.g[i].grad[j]
        ineq_rows.append(tuple(row))
    for t, i in enumerate(mp.active):
        if i in mp.izero and i not in beta:
            ineq_rows.append(tuple(-ONE if c == n + m + t else ZERO for c in range(width)))
    for t in range(nr):
        ineq_rows.append(
            tuple(-ONE if c == n + m + la + t else ZERO for c in range(width))
        )
    return find_feasible(
        LinearSystem(tuple(eq_rows), vec(eq_rhs)),
        LinearSystem(tuple(ineq_rows), zeros(len(ineq_rows))),
    ).optimal


def _extract_ge_multiplier(inst: GeInstance, lay: _QgeLayout, point) -> GeMultiplier:
    return GeMultiplier(
        tuple(point[lay.eta : lay.eta + lay.n]),
        tuple(point[lay.qstar : lay.qstar + lay.m]),
        tuple(point[lay.q : lay.q + lay.m]),
    )


def check_q(inst: GeInstance, pair: tuple) -> Certificate:
    """One subset pair covering the degenerate set; the explicit system
    and the two memberships are computed independently and must agree."""
    beta1, beta2 = tuple(pair[0]), tuple(pair[1])
    mp = multiplier_polytope(inst)
    if set(beta1) | set(beta2) != set(mp.izero):
        raise ValueError("pair must cover the degenerate active set")
    lay, eq_rows, eq_rhs, ineq_rows = _pair_system(inst, beta1, beta2)
    res = find_feasible(
        LinearSystem(tuple(eq_rows), vec(eq_rhs)),
        LinearSystem(tuple(ineq_rows), zeros(len(ineq_rows))),
    )
    members = _membership_route(inst, beta1) and _membership_route(inst, beta2)
    if res.optimal != members:
        raise InternalError("system and membership routes disagree")
    if not res.optimal:
        return Certificate(
            "q",
            False,
            refutation=res.farkas,
            assumptions=_assumptions(inst),
            detail={"pair": (beta1, beta2)},
        )
    gm = _extract_ge_multiplier(inst, lay, res.point)
    qc1 = build_q_cone(inst, beta1)
    lam_vec = tuple(gm.eta_c) + tuple(gm.qstar) + tuple(gm.q)
    if multiplier_image_ge(inst, gm) != tuple(-a for a in inst.f_grad):
        raise InternalError("ge q multiplier fails to realize the gradient")
    if not q_polar_contains(inst, qc1, lam_vec):
        raise InternalError("ge q multiplier escapes the first polar")
    return Certificate(
        "q",
        True,
        multiplier=gm,
        assumptions=_assumptions(inst),
        detail={
            "pair": (beta1, beta2),
            "r": tuple(res.point[lay.r : lay.r + lay.m]),
            "mu_q": tuple(res.point[lay.mu_q : lay.mu_q + lay.la]),
            "mu_r": tuple(res.point[lay.mu_r : lay.mu_r + lay.la]),
        },
    )


def check_qm(
    inst: GeInstance,
    pair: tuple | None = None,
    nd_branches: tuple | None = None,
    cap: int = DEFAULT_CAP,
) -> Certificate:
    """Directional stationarity with the multiplier inside the limiting
    normal cone.  The limiting cone of the graph is not derivable from
    the instance data, so the caller must supply it as a finite union of
    halfspace cones over (eta, q*, q); without it the verdict is
    unavailable by contract."""
    if nd_branches is None:
        return Certificate(
            "qm",
            None,
            assumptions=_assumptions(inst),
            detail={
                "reason": "no description of the limiting normal cone was supplied"
            },
        )
    pairs = [pair] if pair is not None else list(admissible_pairs(inst, cap))
    lay = _layout(inst)
    base = lay.n + 2 * lay.m
    refutations = []
    for beta1, beta2 in pairs:
        _, eq_rows, eq_rhs, ineq_rows = _pair_system(inst, tuple(beta1), tuple(beta2))
        for bi, branch in enumerate(nd_branches):
            if branch.dim != base:
                raise ValueError("limiting-cone branches must live over (eta, q*, q)")
            b_eq = [tuple(row) + (ZERO,) * (lay.width - base) for row in branch.eq]
            b_ineq = [tuple(row) + (ZERO,) * (lay.width - base) for row in branch.ineq]
            res = find_feasible(
                LinearSystem(tuple(eq_rows) + tuple(b_eq), vec(eq_rhs) + zeros(len(b_eq))),
                LinearSystem(
                    tuple(ineq_rows) + tuple(b_ineq),
                    zeros(len(ineq_rows) + len(b_ineq)),
                ),
            )
            if res.optimal:
                gm = _extract_ge_multiplier(inst, lay, res.point)
                lam_vec = tuple(gm.eta_c) + tuple(gm.qstar) + tuple(gm.q)
                if not branch.contains(lam_vec):
                    raise InternalError("qm multiplier escapes its limiting branch")
                return Certificate(
                    "qm",
                    True,
                    multiplier=gm,
                    assumptions=_assumptions(inst),
                    detail={"pair": (tuple(beta1), tuple(beta2)), "branch": bi},
                )
            refutations.append(((tuple(beta1), tuple(beta2)), bi, res.farkas))
    return Certificate(
        "qm", False, refutation=tuple(refutations), assumptions=_assumptions(inst)
    )


# ---------------------------------------------------------------------------
# qualifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeQualResult:
    ok: bool
    witnesses: dict | None
    failed_at: object | None


def qual_partition_systems(inst: GeInstance, pair: tuple) -> GeQualResult:
    """Per-index direction systems certifying exactness of the
    normal-cone formula for a disjoint partition of the degenerate set."""
    beta1, beta2 = tuple(pair[0]), tuple(pair[1])
    mp = multiplier_polytope(inst)
    if set(beta1) & set(beta2) or set(beta1) | set(beta2) != set(mp.izero):
        raise ValueError("pair must partition the degenerate active set")
    lam, _ = lambda_bar(inst)
    shift = hessian_shift(inst, lam)
    lin_tc = lineality(inst.tc)
    n, m = inst.n, inst.m
    gyp = tuple(
        tuple(inst.gy[j][c] + shift[j][c] for c in range(m)) for j in range(m)
    )
    nl = len(lin_tc)
    width = len(mp.iplus) + m + nl  # alpha | z | lineality coefficients
    gx_cols = [matvec(inst.gx, lb) for lb in lin_tc]
    witnesses = {}

    def base_rows(sign: Rat, rhs_vec):
        rows, rhs = [], []
        for j in range(m):
            row = [ZERO] * width
            for t, i in enumerate(mp.iplus):
                row[t] = sign * inst.g[i].grad[j]
            for c in range(m):
                row[len(mp.iplus) + c] = sign * gyp[j][c]
            for t in range(nl):
                row[len(mp.iplus) + m + t] = -sign * gx_cols[t][j]
            rows.append(tuple(row))
            rhs.append(rhs_vec[j])
        return rows, rhs

    for j in beta2:
        rows, rhs = base_rows(-ONE, tuple(-g for g in inst.g[j].grad))
        # grad g_j - sum alpha grad g - (Gy + shift) z + Gx l = 0, rearranged
        for i in mp.active:
            row = [ZERO] * width
            for c in range(m):
                row[len(mp.iplus) + c] = inst.g[i].grad[c]
            rows.append(tuple(row))
            rhs.append(ZERO)
        res = find_feasible(LinearSystem(tuple(rows), vec(rhs)), LinearSystem.empty())
        if not res.optimal:
            return GeQualResult(False, None, ("second-block", j))
        witnesses[("second-block", j)] = res.point
    for k in beta1:
        rows, rhs = base_rows(ONE, zeros(m))
        for i in mp.active:
            row = [ZERO] * width
            for c in range(m):
                row[len(mp.iplus) + c] = inst.g[i].grad[c]
            rows.append(tuple(row))
            rhs.append(-ONE if i == k else ZERO)
        res = find_feasible(LinearSystem(tuple(rows), vec(rhs)), LinearSystem.empty())
        if not res.optimal:
            return GeQualResult(False, None, ("first-block", k))
        witnesses[("first-block", k)] = res.point
    return GeQualResult(True, witnesses, None)


@dataclass(frozen=True)
class ConstantQualResult:
    ok: bool
    kernel_condition: bool
    interior_condition: bool
    constancy: str


def qual_constant_multiplier(inst: GeInstance, cap: int = DEFAULT_CAP) -> ConstantQualResult:
    """The two conditions certifying exactness under a constant
    directional multiplier map: a kernel orthogonality condition on the
    span of the critical cone, and strict feasibility of an interior
    combination."""
    status, _ = constancy_status(inst, cap)
    if status == "failed":
        raise ConstancyNotEstablished(
            "directional multiplier map not constant on sampled critical directions"
        )
    mp = multiplier_polytope(inst)
    lam, _ = lambda_bar(inst)
    shift = hessian_shift(inst, lam)
    m, n = inst.m, inst.n
    a55 = tuple(
        tuple(inst.gy[j][c] + shift[j][c] for c in range(m)) for j in range(m)
    )
    z_rows = [inst.g[i].grad for i in mp.iplus]
    z_rows += [matvec(inst.gx, lb) for lb in lineality(inst.tc)]
    cond_a = True
    for w in span_basis(critical_cone(inst)):
        target = matvec(a55, w)
        if linalg.in_span(tuple(z_rows), target) is None:
            cond_a = False
            break

    imp = set(implicit_rows(inst.tc))
    la = len(mp.active)
    width = n + m + la
    eq_rows = []
    for row in inst.tc.eq:
        eq_rows.append(tuple(row) + (ZERO,) * (m + la))
    for idx in sorted(imp):
        eq_rows.append(tuple(inst.tc.ineq[idx]) + (ZERO,) * (m + la))
    for j in range(m):
        row = [ZERO] * width
        for c in range(n):
            row[c] = inst.gx[j][c]
        for c in range(m):
            row[n + c] = inst.gy[j][c] + shift[j][c]
        for t, i in enumerate(mp.active):
            row[n + m + t] = inst.g[i].grad[j]
        eq_rows.append(tuple(row))
    for i in mp.iplus:
        eq_rows.append((ZERO,) * n + tuple(inst.g[i].grad) + (ZERO,) * la)
    ub_rows, strict = [], []
    for idx, row in enumerate(inst.tc.ineq):
        if idx not in imp:
            strict.append(len(ub_rows))
            ub_rows.append(tuple(row) + (ZERO,) * (m + la))
    for i in mp.izero:
        ub_rows.append((ZERO,) * n + tuple(inst.g[i].grad) + (ZERO,) * la)
    for t, i in enumerate(mp.active):
        if i in mp.izero:
            strict.append(len(ub_rows))
            ub_rows.append(tuple(-ONE if c == n + m + t else ZERO for c in range(width)))
    cond_b = strict_feasible(
        LinearSystem(tuple(eq_rows), zeros(len(eq_rows))),
        LinearSystem(tuple(ub_rows), zeros(len(ub_rows))),
        tuple(strict),
    ).ok
    return ConstantQualResult(cond_a and cond_b, cond_a, cond_b, status)


# ---------------------------------------------------------------------------
# the complementarity encoding bridge and report orchestration
# ---------------------------------------------------------------------------


def is_complementarity_structured(inst: GeInstance) -> bool:
    """All Hessians zero and the constraint block is y <= 0 coordinatewise."""
    if len(inst.g) != inst.m:
        return False
    for i, gc in enumerate(inst.g):
        if any(any(a != 0 for a in row) for row in gc.hess):
            return False
        if any(gc.grad[j] != (ONE if j == i else ZERO) for j in range(inst.m)):
            return False
    return True


def to_mpcc(inst: GeInstance):
    """The complementarity reformulation over (x, y) for structured
    instances: pairs (-y_i, -G_i) with the parameter cone as rows."""
    from .instances import FunData, MpccInstance

    if not is_complementarity_structured(inst):
        raise ValueError("encoding needs zero Hessians and coordinate constraints")
    n, m = inst.n, inst.m
    h = tuple(
        FunData(ZERO, tuple(row) + (ZERO,) * m) for row in inst.tc.eq
    )
    g = tuple(
        FunData(ZERO, tuple(row) + (ZERO,) * m) for row in inst.tc.ineq
    )
    big_g, big_h = [], []
    for i in range(m):
        grad_g = [ZERO] * (n + m)
        grad_g[n + i] = -ONE
        big_g.append(FunData(-inst.g[i].value, tuple(grad_g)))
        grad_h = [-a for a in inst.gx[i]] + [-a for a in inst.gy[i]]
        big_h.append(FunData(-inst.g_val[i], tuple(grad_h)))
    return MpccInstance(
        n + m,
        inst.f_grad,
        h,
        g,
        tuple(big_g),
        tuple(big_h),
        ggcq_asserted=inst.ggcq_asserted,
    )


def _coordinate_normal_rows(tc: HCone):
    """Halfspace rows of the parameter normal cone when the tangent cone
    is coordinate-structured (each row a signed unit vector)."""
    n = tc.dim
    pinned, halves = set(), {}
    for row in tc.eq:
        nz = [j for j in range(n) if row[j] != 0]
        if len(nz) != 1:
            raise ValueError("tangent cone is not coordinate-structured")
        pinned.add(nz[0])
    for row in tc.ineq:
        nz = [j for j in range(n) if row[j] != 0]
        if len(nz) != 1:
            raise ValueError("tangent cone is not coordinate-structured")
        j = nz[0]
        halves.setdefault(j, set()).add(1 if row[j] > 0 else -1)
    eq_rows, ineq_rows = [], []
    for j in range(n):
        if j in pinned:
            continue  # eta_j free
        signs = halves.get(j, set())
        if len(signs) == 2:
            continue  # both halves cut away: eta_j free
        if not signs:
            e = [ZERO] * n
            e[j] = ONE
            eq_rows.append(tuple(e))  # tangent free in j: eta_j = 0
        else:
            s = signs.pop()
            e = [ZERO] * n
            e[j] = -ONE if s > 0 else ONE
            ineq_rows.append(tuple(e))
    return eq_rows, ineq_rows


def complementarity_nd_branches(inst: GeInstance, cap: int = DEFAULT_CAP):
    """The exact limiting-cone branch family for structured instances,
    one halfspace cone per choice of biactive piece.

    Coordinates are (eta, q*, q); per degenerate index the pieces are
    (q*_i >= 0, q_i <= 0), (q*_i = 0), (q_i = 0)."""
    if not is_complementarity_structured(inst):
        raise ValueError("branch family needs the coordinate structure")
    mp = multiplier_polytope(inst)
    n, m = inst.n, inst.m
    dim = n + 2 * m
    if 3 ** len(mp.izero) > cap:
        raise SubsetLimitExceeded(3 ** len(mp.izero), cap)
    eta_eq, eta_ineq = _coordinate_normal_rows(inst.tc)
    base_eq = [tuple(r) + (ZERO,) * 2 * m for r in eta_eq]
    base_ineq = [tuple(r) + (ZERO,) * 2 * m for r in eta_ineq]

    def unit(j, coeff):
        row = [ZERO] * dim
        row[j] = coeff
        return tuple(row)

    for i in range(m):
        if i not in mp.active:
            base_eq.append(unit(n + i, ONE))  # q*_i = 0 off the active set
        elif i in mp.iplus:
            base_eq.append(unit(n + m + i, ONE))  # q_i = 0 on the positive part
    from itertools import product as iproduct

    branches = []
    for combo in iproduct(range(3), repeat=len(mp.izero)):
        eq = list(base_eq)
        ineq = list(base_ineq)
        for choice, i in zip(combo, mp.izero):
            if choice == 0:
                ineq.append(unit(n + i, -ONE))
                ineq.append(unit(n + m + i, ONE))
            elif choice == 1:
                eq.append(unit(n + i, ONE))
            else:
                eq.append(unit(n + m + i, ONE))
        branches.append(HCone(tuple(eq), tuple(ineq), dim))
    return tuple(branches)


def parse_nd_branches(document, inst: GeInstance):
    """JSON {"branches": [{"eq": [[...]], "ineq": [[...]]}, ...]} over
    (eta, q*, q)."""
    import json as _json

    from .errors import ParseError
    from .rationals import mat

    if isinstance(document, (str, bytes)):
        document = _json.loads(document)
    dim = inst.n + 2 * inst.m
    out = []
    for k, b in enumerate(document.get("branches", [])):
        try:
            out.append(HCone(mat(b.get("eq", [])), mat(b.get("ineq", [])), dim))
        except Exception as exc:
            raise ParseError(f"branch {k} malformed: {exc}") from exc
    return tuple(out)


def certify(inst: GeInstance, nd_branches=None, cap: int = DEFAULT_CAP) -> dict:
    from .oracle import b_stationary

    mp = multiplier_polytope(inst)
    fam = bge_family(inst, cap)
    pairs = admissible_pairs(inst, cap)
    certs = {
        "s": check_s(inst),
        "q": {pr: check_q(inst, pr) for pr in pairs},
        "qm": check_qm(inst, nd_branches=nd_branches, cap=cap),
        "b_oracle": b_stationary(inst, cap),
    }
    try:
        constant_qual = qual_constant_multiplier(inst, cap)
    except ConstancyNotEstablished as exc:
        constant_qual = str(exc)
    from .instances import enumerate_partitions

    partitions = enumerate_partitions(mp.izero, cap)
    quals = {
        "partition_systems": {
            (p.beta1, p.beta2): qual_partition_systems(inst, (p.beta1, p.beta2))
            for p in partitions
        },
        "constant_multiplier": constant_qual,
    }
    q_all = all(c.verdict for c in certs["q"].values())
    if certs["s"].verdict and not q_all:
        raise InternalError("strong verdict without directional verdicts")
    if certs["b_oracle"].verdict and not q_all:
        raise InternalError("no-descent verdict without directional verdicts")
    if certs["qm"].verdict and not any(c.verdict for c in certs["q"].values()):
        raise InternalError("limiting-directional verdict without a directional one")
    return {
        "certificates": certs,
        "qualifications": quals,
        "family": fam,
        "pairs": pairs,
        "polytope": mp,
    }
