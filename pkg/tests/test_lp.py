"""Exact LP solver: statuses, certificates, determinism."""

import random

from gmpy2 import mpq

from mpeccert.lp import (
    Farkas,
    LinearSystem,
    find_feasible,
    solve_lp,
    strict_feasible,
    verify_farkas,
    verify_strict_refutation,
)
from mpeccert.rationals import dot, vec

EMPTY = LinearSystem.empty()


def sys_of(rows, rhs):
    return LinearSystem.of(rows, rhs)


def test_identity_equality():
    # min 0 s.t. u = 0
    res = solve_lp([0, 0], sys_of([[1, 0], [0, 1]], [0, 0]), EMPTY)
    assert res.optimal
    assert res.point == vec([0, 0])
    assert res.value == 0


def test_min_x_above_one():
    # min x s.t. x >= 1
    res = solve_lp([1], EMPTY, sys_of([[-1]], [-1]))
    assert res.optimal
    assert res.point == vec([1])
    assert res.value == 1


def test_unbounded_with_ray():
    # min -x s.t. x >= 0
    res = solve_lp([-1], EMPTY, sys_of([[-1]], [0]))
    assert res.status == "unbounded"
    assert res.ray == vec([1])


def test_infeasible_farkas():
    eq = sys_of([[1, 1]], [2])
    ub = sys_of([[1, 0], [0, 1]], [0, 0])
    res = find_feasible(eq, ub)
    assert res.status == "infeasible"
    assert verify_farkas(eq, ub, res.farkas)


def brute_force_min(c, ub):
    """Exact vertex enumeration oracle for small bounded LPs."""
    from itertools import combinations

    from mpeccert import linalg

    d = len(c)
    best = None
    for active in combinations(range(len(ub.a)), d):
        rows = [ub.a[i] for i in active]
        if linalg.rank(rows) < d:
            continue
        x = linalg.solve(rows, [ub.b[i] for i in active])
        if x is None:
            continue
        if all(dot(r, x) <= b for r, b in zip(ub.a, ub.b)):
            val = dot(vec(c), x)
            if best is None or val < best:
                best = val
    return best


def test_degenerate_cycling_guard():
    # cycling-prone degenerate data; Bland's rule must terminate
    ub = sys_of(
        [
            [mpq(1, 4), -8, -1, 9],
            [mpq(1, 2), -12, mpq(-1, 2), 3],
            [0, 0, 1, 0],
            [-1, 0, 0, 0],
            [0, -1, 0, 0],
            [0, 0, -1, 0],
            [0, 0, 0, -1],
        ],
        [0, 0, 1, 0, 0, 0, 0],
    )
    c = [mpq(-3, 4), 150, mpq(-1, 50), 6]
    res = solve_lp(c, EMPTY, ub)
    assert res.optimal
    assert res.value == brute_force_min(c, ub)


def test_max_sense():
    # max x + y in the unit box
    ub = sys_of([[1, 0], [0, 1], [-1, 0], [0, -1]], [1, 1, 0, 0])
    res = solve_lp([1, 1], EMPTY, ub, sense="max")
    assert res.optimal
    assert res.value == 2
    assert res.point == vec([1, 1])


def test_free_variable_equality_mix():
    # min x - y s.t. x + y = 3, x - y <= 1: the objective is free below
    res = solve_lp([1, -1], sys_of([[1, 1]], [3]), sys_of([[1, -1]], [1]))
    assert res.status == "unbounded"
    # min y - x on the same region attains its bound at x - y = 1
    res = solve_lp([-1, 1], sys_of([[1, 1]], [3]), sys_of([[1, -1]], [1]))
    assert res.optimal
    assert res.value == -1


def test_duals_verify_on_random_feasible_lps():
    rng = random.Random(7)
    for _ in range(40):
        d = rng.randint(1, 4)
        n_ub = rng.randint(1, 5)
        rows = [[rng.randint(-3, 3) for _ in range(d)] for _ in range(n_ub)]
        x0 = [rng.randint(-2, 2) for _ in range(d)]
        rhs = [dot(vec(r), vec(x0)) + rng.randint(0, 3) for r in rows]
        # bound the region so the LP cannot be unbounded
        for j in range(d):
            e = [0] * d
            e[j] = 1
            rows.append(list(e))
            rhs.append(x0[j] + 5)
            rows.append([-v for v in e])
            rhs.append(-x0[j] + 5)
        ub = sys_of(rows, rhs)
        c = [rng.randint(-3, 3) for _ in range(d)]
        res = solve_lp(c, EMPTY, ub)
        assert res.optimal  # dual identities are re-verified inside solve_lp


def test_infeasible_random_certificates():
    rng = random.Random(11)
    count = 0
    for _ in range(60):
        d = rng.randint(1, 3)
        rows = [[rng.randint(-2, 2) for _ in range(d)] for _ in range(4)]
        rhs = [rng.randint(-3, 1) for _ in range(4)]
        eq = sys_of(rows[:1], rhs[:1])
        ub = sys_of(rows[1:], rhs[1:])
        res = find_feasible(eq, ub)
        if res.status == "infeasible":
            count += 1
            assert verify_farkas(eq, ub, res.farkas)
    assert count > 0


def test_strict_feasible_basic():
    # {x <= 0} strictly: yes
    r = strict_feasible(EMPTY, sys_of([[1]], [0]), [0])
    assert r.ok and r.witness[0] < 0
    # {x <= 0, -x <= 0} with the first strict: forced x = 0
    ub = sys_of([[1], [-1]], [0, 0])
    r = strict_feasible(EMPTY, ub, [0])
    assert not r.ok
    assert verify_strict_refutation(EMPTY, ub, r.refutation)


def test_strict_feasible_mfcq_flavor():
    # exists v with v < 0
    r = strict_feasible(EMPTY, sys_of([[1]], [0]), [0])
    assert r.ok and r.witness[0] < 0


def test_strict_infeasible_base_is_refuted():
    eq = sys_of([[1]], [1])
    ub = sys_of([[1]], [0])  # x = 1 and x <= 0
    r = strict_feasible(eq, ub, [0])
    assert not r.ok
    if r.farkas is not None:
        assert verify_farkas(eq, ub, r.farkas)
    else:
        assert verify_strict_refutation(eq, ub, r.refutation)


def test_determinism():
    ub = sys_of([[1, 2], [2, 1], [-1, 0], [0, -1]], [4, 4, 0, 0])
    outs = {solve_lp([-1, -1], EMPTY, ub).point for _ in range(5)}
    assert len(outs) == 1
