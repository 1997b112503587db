"""Shared sampling helpers and polyhedral identity checkers.

The identity checkers are written against the definitions only (inner
products against generators, raw feasibility LPs), never against the
cone calculus they validate, so they can serve as independent oracles.
Each returns the number of points exercised; callers assert on it to
pin the sample sizes.
"""

import random

from mpeccert import linalg
from mpeccert.cones import GCone, HCone, image, member, polar, polar_gen
from mpeccert.lp import LinearSystem, find_feasible, solve_lp
from mpeccert.rationals import ZERO, dot, matvec, vec, zeros


def rand_vec(rng: random.Random, dim: int, lo=-3, hi=3):
    return vec([rng.randint(lo, hi) for _ in range(dim)])


def rand_mat(rng: random.Random, rows: int, dim: int, lo=-3, hi=3):
    return tuple(rand_vec(rng, dim, lo, hi) for _ in range(rows))


def random_hcone(rng: random.Random, dim: int, max_rows: int) -> HCone:
    n_eq = rng.randint(0, max_rows // 3)
    n_ub = rng.randint(0, max_rows - n_eq)
    return HCone(rand_mat(rng, n_eq, dim), rand_mat(rng, n_ub, dim), dim)


def random_gcone(rng: random.Random, dim: int, max_gens: int) -> GCone:
    n_rays = rng.randint(0, max_gens)
    n_lin = rng.randint(0, max(0, max_gens - n_rays) // 2)
    return GCone(rand_mat(rng, n_rays, dim), rand_mat(rng, n_lin, dim), dim)


def gcone_sample(rng: random.Random, cone: GCone):
    """A random point of the cone: nonnegative ray + free lineality combo."""
    rc = [rng.randint(0, 3) for _ in cone.rays]
    lc = [rng.randint(-3, 3) for _ in cone.lin]
    return cone.point(vec(rc), vec(lc))


def check_double_polar(rng: random.Random, n_cones: int, pts_per_cone: int):
    """C and polar(polar(C)) agree under membership; polar pairing holds.

    Returns (points tested, cones exercised)."""
    from mpeccert.cones import lineality, relative_interior_point

    tested = 0
    for _ in range(n_cones):
        dim = rng.randint(1, 6)
        cone = random_hcone(rng, dim, 8)
        pol = polar(cone)
        back = polar_gen(pol)
        inside_pts = [relative_interior_point(cone)]
        for l in lineality(cone):
            inside_pts.append(l)
            inside_pts.append(tuple(-a for a in l))
        for _ in range(pts_per_cone):
            x = rand_vec(rng, dim)
            assert cone.contains(x) == back.contains(x)
            if cone.contains(x):
                inside_pts.append(x)
            tested += 1
        for x in inside_pts:
            assert cone.contains(x) and back.contains(x)
            tested += 1
        for _ in range(pts_per_cone // 2):
            y = gcone_sample(rng, pol)
            assert member(pol, y).inside
            for x in inside_pts:
                assert dot(y, x) <= 0
            tested += 1
    return tested, n_cones


def in_image_intersection(a_rows, s1: GCone, s2: GCone, z) -> bool:
    """z in (A s1) and z in (A s2), each via generator membership."""
    m1 = member(image(a_rows, s1), z)
    m2 = member(image(a_rows, s2), z)
    return m1.inside and m2.inside


def in_image_of_shifted_intersection(a_rows, s1: GCone, s2: GCone, z) -> bool:
    """z in A(s1 cap (ker A + s2)), decided by one raw feasibility LP."""
    s = len(a_rows)
    d = s1.dim
    n1r, n1l = len(s1.rays), len(s1.lin)
    n2r, n2l = len(s2.rays), len(s2.lin)
    nv = n1r + n1l + n2r + n2l + d  # coeffs of s1, coeffs of s2, kernel point
    rows = []
    rhs = []

    def gen_cols(point_rows, offset, gens):
        for gi, g in enumerate(gens):
            for r, gr in zip(point_rows, g):
                r[offset + gi] += gr

    # x := s1.point(c1); constraint A x = z
    ax_rows = [[ZERO] * nv for _ in range(s)]
    for gi, g in enumerate(s1.rays + s1.lin):
        ag = matvec(a_rows, g)
        for i in range(s):
            ax_rows[i][gi] += ag[i]
    rows += [tuple(r) for r in ax_rows]
    rhs += list(z)

    # x - k - s2.point(c2) = 0
    off2 = n1r + n1l
    offk = off2 + n2r + n2l
    mid = [[ZERO] * nv for _ in range(d)]
    gen_cols(mid, 0, s1.rays + s1.lin)
    for gi, g in enumerate(s2.rays + s2.lin):
        for i in range(d):
            mid[i][off2 + gi] -= g[i]
    for i in range(d):
        mid[i][offk + i] -= 1
    rows += [tuple(r) for r in mid]
    rhs += [ZERO] * d

    # A k = 0
    ak = [[ZERO] * nv for _ in range(s)]
    for i in range(s):
        for j in range(d):
            ak[i][offk + j] = a_rows[i][j]
    rows += [tuple(r) for r in ak]
    rhs += [ZERO] * s

    eq = LinearSystem(tuple(rows), vec(rhs))
    sign_idx = list(range(n1r)) + [off2 + i for i in range(n2r)]
    ub_rows = tuple(
        tuple(-1 if k == i else ZERO for k in range(nv)) for i in sign_idx
    )
    ub = LinearSystem(vec_rows(ub_rows), zeros(len(sign_idx)))
    return find_feasible(eq, ub).optimal


def vec_rows(rows):
    return tuple(vec(r) for r in rows)


def check_image_intersection_identity(
    rng: random.Random, n_trials: int, pts_per_trial: int
):
    """(A S1) cap (A S2) equals A(S1 cap (ker A + S2)) on sampled points."""
    tested, cones = 0, 0
    for _ in range(n_trials):
        d = rng.randint(1, 4)
        s = rng.randint(1, 3)
        a_rows = rand_mat(rng, s, d, -2, 2)
        s1 = random_gcone(rng, d, 4)
        s2 = random_gcone(rng, d, 4)
        cones += 2
        pts = []
        for _ in range(pts_per_trial):
            pts.append(matvec(a_rows, gcone_sample(rng, s1)))
            pts.append(matvec(a_rows, gcone_sample(rng, s2)))
            pts.append(rand_vec(rng, s))
        for z in pts:
            assert in_image_intersection(a_rows, s1, s2, z) == \
                in_image_of_shifted_intersection(a_rows, s1, s2, z)
            tested += 1
    return tested, cones


def in_preimage_polar(a_rows, pieces, xstar) -> bool:
    """x* in {u : A u in conv(union of pieces)}^o, from the definition.

    conv of a finite union of generator cones is their Minkowski sum, so
    the polar membership is `max x*.u <= 0` over {u : Au = sum of piece
    points}; for a cone LP the optimum is either 0 or unbounded.
    """
    d = len(a_rows[0])
    s = len(a_rows)
    sizes = [(len(p.rays), len(p.lin)) for p in pieces]
    nv = d + sum(r + l for r, l in sizes)
    rows = [[ZERO] * nv for _ in range(s)]
    for i in range(s):
        for j in range(d):
            rows[i][j] = a_rows[i][j]
    off = d
    for p in pieces:
        for gi, g in enumerate(p.rays + p.lin):
            for i in range(s):
                rows[i][off + gi] -= g[i]
        off += len(p.rays) + len(p.lin)
    eq = LinearSystem(vec_rows(rows), zeros(s))
    ub_idx = []
    off = d
    for p in pieces:
        ub_idx += [off + i for i in range(len(p.rays))]
        off += len(p.rays) + len(p.lin)
    ub = LinearSystem(
        vec_rows(
            tuple(tuple(-1 if k == i else ZERO for k in range(nv)) for i in ub_idx)
        ),
        zeros(len(ub_idx)),
    )
    c = list(xstar) + [ZERO] * (nv - d)
    res = solve_lp([-ci for ci in c], eq, ub)  # min -x*.u ; 0 attainable
    if res.status == "unbounded":
        return False
    assert res.value == 0
    return True


def in_transposed_image_of_polar(a_rows, pieces, xstar) -> bool:
    """x* in A^T C^o with C^o = intersection of the piece polars (H-form)."""
    s = len(a_rows)
    d = len(a_rows[0])
    eq_rows = []
    ub_rows = []
    for p in pieces:
        hp = polar_gen(p)
        eq_rows += list(hp.eq)
        ub_rows += list(hp.ineq)
    # variables w in R^s with A^T w = x*
    at_rows = tuple(tuple(a_rows[i][j] for i in range(s)) for j in range(d))
    eq = LinearSystem(at_rows + tuple(eq_rows), vec(list(xstar) + [0] * len(eq_rows)))
    ub = LinearSystem(tuple(ub_rows), zeros(len(ub_rows)))
    return find_feasible(eq, ub).optimal


def check_preimage_polar_identity(
    rng: random.Random, n_trials: int, pts_per_trial: int
):
    """{u : Au in conv C}^o = A^T C^o for unions of polyhedral cones."""
    tested, cones = 0, 0
    for _ in range(n_trials):
        s = rng.randint(1, 3)
        d = rng.randint(1, 4)
        a_rows = rand_mat(rng, s, d, -2, 2)
        pieces = [random_gcone(rng, s, 3) for _ in range(rng.randint(1, 3))]
        cones += len(pieces)
        polars = [polar_gen(p) for p in pieces]
        pts = []
        for _ in range(pts_per_trial):
            pts.append(rand_vec(rng, d))
            # constructed members of A^T C^o, C^o = intersection of polars
            cand = rand_vec(rng, s, -2, 2)
            if all(hp.contains(cand) for hp in polars):
                pts.append(matvec(at(a_rows, d), cand))
        for x in pts:
            assert in_preimage_polar(a_rows, pieces, x) == \
                in_transposed_image_of_polar(a_rows, pieces, x)
            tested += 1
    return tested, cones


def at(a_rows, d):
    return tuple(tuple(a_rows[i][j] for i in range(len(a_rows))) for j in range(d))


def check_product_union_polar_rule(
    rng: random.Random, n_trials: int, pts_per_trial: int
):
    """Polars of factorwise unions multiply: membership is componentwise."""
    tested, cones = 0, 0
    for _ in range(n_trials):
        n_factors = rng.randint(1, 3)
        dims = [rng.randint(1, 2) for _ in range(n_factors)]
        ps = [random_gcone(rng, dm, 3) for dm in dims]
        qs = [random_gcone(rng, dm, 3) for dm in dims]
        cones += 2 * n_factors
        total = sum(dims)
        for _ in range(pts_per_trial):
            x = rand_vec(rng, total)
            off = 0
            componentwise = True
            for dm, p, q in zip(dims, ps, qs):
                xi = x[off : off + dm]
                off += dm
                if not (polar_gen(p).contains(xi) and polar_gen(q).contains(xi)):
                    componentwise = False
                    break
            # product polars evaluated from raw generator inner products
            direct = True
            off = 0
            for dm, p, q in zip(dims, ps, qs):
                xi = x[off : off + dm]
                off += dm
                for g in p.rays + q.rays:
                    if dot(xi, g) > 0:
                        direct = False
                for g in p.lin + q.lin:
                    if dot(xi, g) != 0:
                        direct = False
            assert componentwise == direct
            tested += 1
    return tested, cones


def check_ge_tangent_cover(inst, rng: random.Random, n_samples: int) -> int:
    """Sampled equivalence: (u, v, v*) in the graph tangent description
    iff it lies in some subset cone.  Returns points exercised."""
    from mpeccert import ge
    from mpeccert.cones import lineality, relative_interior_point
    from mpeccert.rationals import add, dot, matvec, sub

    mp = ge.multiplier_polytope(inst)
    kk = ge.critical_cone(inst)
    kk_polar = ge.critical_cone_polar(inst)
    shift = ge.hessian_shift(inst)
    cones = [
        ge.build_q_cone(inst, beta)
        for beta in _all_subsets(mp.izero)
    ]

    def in_tangent(u, v, vstar):
        if not inst.tc.contains(u) or not kk.contains(v):
            return False
        s = sub(vstar, matvec(shift, v))
        if dot(s, v) != 0:
            return False
        return member(kk_polar, s).inside

    def cone_point(hcone, scale):
        base = relative_interior_point(hcone)
        out = list(base)
        for lv in lineality(hcone):
            c = rng.randint(-2, 2)
            out = [a + c * b for a, b in zip(out, lv)]
        t = rng.randint(0, scale)
        return vec([t * a for a in out])

    tested = 0
    for _ in range(n_samples):
        if rng.random() < 0.5:
            # constructed tangent member
            u = cone_point(inst.tc, 2)
            v = cone_point(kk, 2)
            s = [ZERO] * inst.m
            for i in mp.active:
                gv = dot(vec(inst.g[i].grad), v)
                if gv == 0:
                    c = rng.randint(0, 2)
                    for j in range(inst.m):
                        s[j] += c * inst.g[i].grad[j]
            vstar = add(matvec(shift, v), vec(s))
            point = tuple(u) + tuple(v) + tuple(vstar)
            assert in_tangent(u, v, vstar)
            assert any(ge.q_cone_contains(inst, qc, point) for qc in cones)
        else:
            u = rand_vec(rng, inst.n, -2, 2)
            v = rand_vec(rng, inst.m, -2, 2)
            vstar = rand_vec(rng, inst.m, -2, 2)
            point = tuple(u) + tuple(v) + tuple(vstar)
            covered = any(ge.q_cone_contains(inst, qc, point) for qc in cones)
            assert covered == in_tangent(u, v, vstar)
        tested += 1
    return tested


def _all_subsets(idx):
    out = []
    for mask in range(1 << len(idx)):
        out.append(tuple(i for b, i in enumerate(idx) if mask >> b & 1))
    return out
