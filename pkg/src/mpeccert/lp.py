"""Exact rational linear programming with re-verifiable certificates.

Two-phase tableau simplex over mpq with Bland's pivoting rule, so every
run terminates and identical inputs give identical outputs.  Variables
are free; the standard form (variable splitting, slacks, artificials)
is an internal detail.

Every outcome carries a certificate that is re-verified before it is
returned:

* optimal   -- a point satisfying all constraints exactly, its value,
               and row duals,
* infeasible -- a Farkas vector combining the rows into 0 = lhs with a
               negative rhs,
* unbounded -- a recession direction that strictly improves the
               objective.

`strict_feasible` decides systems with some inequalities required to
hold strictly, by maximising one shared slack t (capped at 1) added to
each strict row; strict feasibility holds exactly when the optimum is
positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionMismatch, InternalError
from .rationals import Mat, Rat, Vec, ZERO, ONE, dot, mat, mat_t_vec, vec

_MAX_PIVOTS = 100_000


@dataclass(frozen=True)
class LinearSystem:
    """Rows `a` paired with right-hand sides `b` (interpreted = or <=)."""

    a: Mat
    b: Vec

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise DimensionMismatch("row/rhs count mismatch")

    @staticmethod
    def empty() -> "LinearSystem":
        return LinearSystem((), ())

    @staticmethod
    def of(rows, rhs) -> "LinearSystem":
        return LinearSystem(mat(rows), vec(rhs))

    def stacked(self, other: "LinearSystem") -> "LinearSystem":
        return LinearSystem(self.a + other.a, self.b + other.b)

    def __len__(self) -> int:
        return len(self.a)


@dataclass(frozen=True)
class Farkas:
    """Multipliers proving {eq, ub} has no solution.

    Properties (all exact): y_ub >= 0 componentwise,
    A_eq^T y_eq + A_ub^T y_ub = 0, and
    b_eq . y_eq + b_ub . y_ub < 0.
    """

    y_eq: Vec
    y_ub: Vec


@dataclass(frozen=True)
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    point: Vec | None = None
    value: Rat | None = None
    farkas: Farkas | None = None
    ray: Vec | None = None
    dual_eq: Vec | None = None
    dual_ub: Vec | None = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def verify_farkas(eq: LinearSystem, ub: LinearSystem, cert: Farkas) -> bool:
    if any(y < 0 for y in cert.y_ub):
        return False
    combo = mat_t_vec(eq.a + ub.a, cert.y_eq + cert.y_ub)
    if any(c != 0 for c in combo):
        return False
    return dot(eq.b + ub.b, cert.y_eq + cert.y_ub) < 0


def _check_dims(c, eq: LinearSystem, ub: LinearSystem):
    d = len(c)
    for row in eq.a + ub.a:
        if len(row) != d:
            raise DimensionMismatch(f"row width {len(row)} != {d} variables")


def solve_lp(c, eq: LinearSystem, ub: LinearSystem, sense: str = "min") -> LpResult:
    """Minimise (or maximise) c.x subject to eq.a x = eq.b and ub.a x <= ub.b.

    Dual convention at optimality (sense "min"):
    A_eq^T dual_eq + A_ub^T dual_ub = c, dual_ub <= 0,
    dual_eq . b_eq + dual_ub . b_ub = value.  For "max" the duals are
    negated so the same identities hold with the original objective.
    """
    if sense not in ("min", "max"):
        raise ValueError(f"sense must be 'min' or 'max', not {sense!r}")
    cvec = vec(c)
    _check_dims(cvec, eq, ub)
    if sense == "max":
        res = _solve_min(tuple(-x for x in cvec), eq, ub)
        if res.status == "optimal":
            res = LpResult(
                "optimal",
                point=res.point,
                value=-res.value,
                dual_eq=tuple(-y for y in res.dual_eq),
                dual_ub=tuple(-y for y in res.dual_ub),
            )
        return res
    return _solve_min(cvec, eq, ub)


def find_feasible(eq: LinearSystem, ub: LinearSystem) -> LpResult:
    """Feasibility of {eq, ub}: optimal with a point, or infeasible with Farkas."""
    d = len(eq.a[0]) if eq.a else (len(ub.a[0]) if ub.a else 0)
    return _solve_min((ZERO,) * d, eq, ub)


def _solve_min(c: Vec, eq: LinearSystem, ub: LinearSystem) -> LpResult:
    d = len(c)
    m_eq, m_ub = len(eq), len(ub)
    m = m_eq + m_ub
    n_struct = 2 * d + m_ub  # u, v, slacks
    ncols = n_struct + m  # + artificials

    rows_a = eq.a + ub.a
    rhs_all = eq.b + ub.b
    sigma = [(-ONE if b < 0 else ONE) for b in rhs_all]

    tab: list[list] = []
    for i in range(m):
        s = sigma[i]
        arow = rows_a[i]
        row = [ZERO] * (ncols + 1)
        for j, aij in enumerate(arow):
            if aij != 0:
                row[j] = s * aij
                row[d + j] = -s * aij
        if i >= m_eq:
            row[2 * d + (i - m_eq)] = s
        row[n_struct + i] = ONE
        row[ncols] = s * rhs_all[i]
        tab.append(row)
    basis = [n_struct + i for i in range(m)]

    # phase 1: minimise the sum of artificials
    costrow = [ZERO] * (ncols + 1)
    for j in range(ncols + 1):
        t = ZERO
        for i in range(m):
            t += tab[i][j]
        costrow[j] = -t
    for i in range(m):
        costrow[n_struct + i] += ONE  # artificial cost 1; basics net to 0
    _pivot_loop(tab, costrow, basis, allowed_max=ncols, phase=1)

    p1_value = -costrow[ncols]
    if p1_value > 0:
        y_std = [ONE - (costrow[n_struct + i] if i < m else ZERO) for i in range(m)]
        w = [-sigma[i] * y_std[i] for i in range(m)]
        cert = Farkas(tuple(w[:m_eq]), tuple(w[m_eq:]))
        if not verify_farkas(eq, ub, cert):
            raise InternalError("farkas certificate failed re-verification")
        return LpResult("infeasible", farkas=cert)

    # drive artificials out of the basis where possible; rows whose
    # structural entries all vanished are inert (no pivot ever touches
    # them) and stay with their artificial stuck at zero
    for pos in range(m):
        if basis[pos] < n_struct:
            continue
        row = tab[pos]
        col = next((j for j in range(n_struct) if row[j] != 0), None)
        if col is not None:
            _pivot(tab, costrow, basis, pos, col)

    # phase 2
    cost_of = lambda j: (c[j] if j < d else (-c[j - d] if j < 2 * d else ZERO))
    costrow = [ZERO] * (ncols + 1)
    for j in range(n_struct):
        costrow[j] = cost_of(j)
    for i, row in enumerate(tab):
        cb = cost_of(basis[i])
        if cb != 0:
            for j in range(ncols + 1):
                if row[j] != 0:
                    costrow[j] -= cb * row[j]
    entering = _pivot_loop(tab, costrow, basis, allowed_max=n_struct, phase=2)

    if entering is not None:  # unbounded: recession direction from the column
        z = [ZERO] * n_struct
        z[entering] = ONE
        for i, row in enumerate(tab):
            if basis[i] < n_struct:
                z[basis[i]] = -row[entering]
        ray = tuple(z[j] - z[d + j] for j in range(d))
        if (
            any(dot(row, ray) != 0 for row in eq.a)
            or any(dot(row, ray) > 0 for row in ub.a)
            or dot(c, ray) >= 0
        ):
            raise InternalError("unbounded ray failed re-verification")
        return LpResult("unbounded", ray=ray)

    x_std = [ZERO] * ncols
    for i, row in enumerate(tab):
        x_std[basis[i]] = row[ncols]
    point = tuple(x_std[j] - x_std[d + j] for j in range(d))
    value = -costrow[ncols]

    y = [sigma[i] * (-costrow[n_struct + i]) for i in range(m)]
    dual_eq, dual_ub = tuple(y[:m_eq]), tuple(y[m_eq:])

    if any(dot(row, point) != b for row, b in zip(eq.a, eq.b)):
        raise InternalError("optimal point violates an equality row")
    if any(dot(row, point) > b for row, b in zip(ub.a, ub.b)):
        raise InternalError("optimal point violates an inequality row")
    if dot(c, point) != value:
        raise InternalError("optimal value mismatch")
    if any(yi > 0 for yi in dual_ub):
        raise InternalError("dual sign failed re-verification")
    combo = mat_t_vec(eq.a + ub.a, dual_eq + dual_ub) if m else (ZERO,) * d
    if combo != vec(c):
        raise InternalError("dual stationarity failed re-verification")
    if dot(eq.b + ub.b, dual_eq + dual_ub) != value:
        raise InternalError("dual value failed re-verification")
    return LpResult("optimal", point=point, value=value, dual_eq=dual_eq, dual_ub=dual_ub)


def _pivot(tab, costrow, basis, prow_i: int, col: int):
    prow = tab[prow_i]
    pv = prow[col]
    if pv != 1:
        inv = 1 / pv
        tab[prow_i] = prow = [x * inv for x in prow]
    for i, row in enumerate(tab):
        if i != prow_i and row[col] != 0:
            f = row[col]
            tab[i] = [a - f * b for a, b in zip(row, prow)]
    if costrow[col] != 0:
        f = costrow[col]
        costrow[:] = [a - f * b for a, b in zip(costrow, prow)]
    basis[prow_i] = col


def _pivot_loop(tab, costrow, basis, allowed_max: int, phase: int) -> int | None:
    """Bland's rule; returns the entering column when unbounded, else None."""
    rhs_col = len(costrow) - 1
    for _ in range(_MAX_PIVOTS):
        col = next((j for j in range(allowed_max) if costrow[j] < 0), None)
        if col is None:
            return None
        leave, best = None, None
        for i, row in enumerate(tab):
            piv = row[col]
            if piv > 0:
                ratio = row[rhs_col] / piv
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            if phase == 1:
                raise InternalError("phase-1 objective unbounded below")
            return col
        _pivot(tab, costrow, basis, leave, col)
    raise InternalError("pivot limit exceeded; simplex failed to terminate")


@dataclass(frozen=True)
class StrictRefutation:
    """Multipliers proving no point satisfies the strict rows strictly.

    Properties: y_ub >= 0, A_eq^T y_eq + A_ub^T y_ub = 0,
    sum of y_ub over strict rows = 1, and b_eq . y_eq + b_ub . y_ub <= 0.
    They force at least one strict row to be tight at every feasible point.
    """

    y_eq: Vec
    y_ub: Vec
    strict: tuple


@dataclass(frozen=True)
class StrictResult:
    ok: bool
    witness: Vec | None = None
    farkas: Farkas | None = None  # set when even the weak system is infeasible
    refutation: StrictRefutation | None = None


def verify_strict_refutation(eq: LinearSystem, ub: LinearSystem, r: StrictRefutation) -> bool:
    if any(y < 0 for y in r.y_ub):
        return False
    combo = mat_t_vec(eq.a + ub.a, r.y_eq + r.y_ub)
    if any(cj != 0 for cj in combo):
        return False
    if sum((r.y_ub[i] for i in r.strict), ZERO) != 1:
        return False
    return dot(eq.b + ub.b, r.y_eq + r.y_ub) <= 0


def strict_feasible(eq: LinearSystem, ub: LinearSystem, strict: Sequence[int]) -> StrictResult:
    """Decide existence of x with eq rows tight, ub rows held, strict rows strict."""
    strict = tuple(sorted(set(strict)))
    if any(i < 0 or i >= len(ub) for i in strict):
        raise DimensionMismatch("strict index out of range")
    d = len(eq.a[0]) if eq.a else (len(ub.a[0]) if ub.a else 0)
    strict_set = set(strict)

    eq_x = LinearSystem(tuple(r + (ZERO,) for r in eq.a), eq.b)
    ub_rows = [r + (ONE if i in strict_set else ZERO,) for i, r in enumerate(ub.a)]
    ub_rows.append((ZERO,) * d + (ONE,))  # t <= 1
    ub_x = LinearSystem(tuple(ub_rows), ub.b + (ONE,))

    obj = (ZERO,) * d + (-ONE,)
    res = _solve_min(obj, eq_x, ub_x)

    if res.status == "infeasible":
        cert = Farkas(res.farkas.y_eq, res.farkas.y_ub[:-1])
        if not verify_farkas(eq, ub, cert):
            raise InternalError("base-system farkas failed re-verification")
        return StrictResult(False, farkas=cert)
    if res.status == "unbounded":
        raise InternalError("slack objective cannot be unbounded")

    t_star = -res.value
    if t_star > 0:
        return StrictResult(True, witness=res.point[:d])

    gamma = -res.dual_ub[-1]
    if gamma > 1:
        raise InternalError("cap multiplier above 1 contradicts dual stationarity")
    if gamma == 1:
        # the duals collapse to a Farkas certificate: the weak system is infeasible
        cert = Farkas(
            tuple(-yi for yi in res.dual_eq),
            tuple(-yi for yi in res.dual_ub[:-1]),
        )
        if not verify_farkas(eq, ub, cert):
            raise InternalError("collapsed farkas failed re-verification")
        return StrictResult(False, farkas=cert)
    sc = 1 / (ONE - gamma)
    ref = StrictRefutation(
        tuple(-sc * yi for yi in res.dual_eq),
        tuple(-sc * yi for yi in res.dual_ub[:-1]),
        strict,
    )
    if not verify_strict_refutation(eq, ub, ref):
        raise InternalError("strictness refutation failed re-verification")
    return StrictResult(False, refutation=ref)
