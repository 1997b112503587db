"""Problem instances: point data, validation, active sets, partitions.

An instance is purely local data at the reference point -- values and
gradients (plus Hessians for the generalized-equation case), all exact
rationals.  Feasibility of the point is validated on construction, by
exact comparisons, and classification into active sets never involves
a tolerance.

Instance documents are JSON; rationals are strings "p/q" or integers.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Sequence

from .cones import HCone
from .errors import InfeasiblePoint, ParseError, PartitionLimitExceeded
from .lp import LinearSystem, find_feasible
from .rationals import Mat, Rat, Vec, ZERO, mat, rat, rat_str, vec

DEFAULT_CAP = 1 << 16


@dataclass(frozen=True)
class FunData:
    """Value and gradient of one scalar constraint function at the point."""

    value: Rat
    grad: Vec


@dataclass(frozen=True)
class MpccInstance:
    """Point data for h(x)=0, g(x)<=0, 0 <= G(x) _|_ H(x) >= 0."""

    n: int
    f_grad: Vec
    h: tuple
    g: tuple
    G: tuple
    H: tuple
    ggcq_asserted: bool = False

    def __post_init__(self):
        _check_lengths(self)
        if len(self.G) != len(self.H):
            raise ParseError("complementarity pair count mismatch")
        for i, (gi, hi) in enumerate(zip(self.G, self.H)):
            if gi.value < 0:
                raise InfeasiblePoint(f"G[{i}] >= 0", f"value {rat_str(gi.value)}")
            if hi.value < 0:
                raise InfeasiblePoint(f"H[{i}] >= 0", f"value {rat_str(hi.value)}")
            if gi.value * hi.value != 0:
                raise InfeasiblePoint(f"G[{i}]*H[{i}] = 0")


@dataclass(frozen=True)
class MpvcInstance:
    """Point data for h(x)=0, g(x)<=0, H_i(x) >= 0, G_i(x)H_i(x) <= 0."""

    n: int
    f_grad: Vec
    h: tuple
    g: tuple
    G: tuple
    H: tuple
    ggcq_asserted: bool = False

    def __post_init__(self):
        _check_lengths(self)
        if len(self.G) != len(self.H):
            raise ParseError("vanishing pair count mismatch")
        for i, (gi, hi) in enumerate(zip(self.G, self.H)):
            if hi.value < 0:
                raise InfeasiblePoint(f"H[{i}] >= 0", f"value {rat_str(hi.value)}")
            if gi.value * hi.value > 0:
                raise InfeasiblePoint(f"G[{i}]*H[{i}] <= 0")


def _check_lengths(inst):
    if len(inst.f_grad) != inst.n:
        raise ParseError("f_grad length != n")
    for name in ("h", "g", "G", "H"):
        for fd in getattr(inst, name):
            if len(fd.grad) != inst.n:
                raise ParseError(f"{name} gradient length != n")
    for i, fd in enumerate(inst.h):
        if fd.value != 0:
            raise InfeasiblePoint(f"h[{i}] = 0", f"value {rat_str(fd.value)}")
    for i, fd in enumerate(inst.g):
        if fd.value > 0:
            raise InfeasiblePoint(f"g[{i}] <= 0", f"value {rat_str(fd.value)}")


@dataclass(frozen=True)
class GeConstraint:
    value: Rat
    grad: Vec
    hess: Mat


@dataclass(frozen=True)
class GeInstance:
    """Point data for min f(x,y) s.t. 0 in G(x,y) + NhatGamma(y), x in C.

    Gamma = {y : g_i(y) <= 0}.  `tc` is the tangent cone to C at the
    point; `gx`, `gy` are the two Jacobian blocks of G; `g` holds value,
    gradient, and Hessian of each g_i at ybar.
    """

    n: int
    m: int
    f_grad: Vec
    gx: Mat
    gy: Mat
    g_val: Vec
    g: tuple
    tc: HCone
    lambda_bar: Vec | None = None
    ggcq_asserted: bool = False

    def __post_init__(self):
        if len(self.f_grad) != self.n + self.m:
            raise ParseError("f_grad length != n + m")
        if len(self.gx) != self.m or any(len(r) != self.n for r in self.gx):
            raise ParseError("Gx must be m x n")
        if len(self.gy) != self.m or any(len(r) != self.m for r in self.gy):
            raise ParseError("Gy must be m x m")
        if len(self.g_val) != self.m:
            raise ParseError("G_val length != m")
        if self.tc.dim != self.n:
            raise ParseError("TC ambient dim != n")
        for k, gc in enumerate(self.g):
            if len(gc.grad) != self.m:
                raise ParseError(f"g[{k}] gradient length != m")
            if len(gc.hess) != self.m or any(len(r) != self.m for r in gc.hess):
                raise ParseError(f"g[{k}] hessian must be m x m")
            for i in range(self.m):
                for j in range(i):
                    if gc.hess[i][j] != gc.hess[j][i]:
                        raise ParseError(f"g[{k}] hessian not symmetric")
            if gc.value > 0:
                raise InfeasiblePoint(f"g[{k}](ybar) <= 0", f"value {rat_str(gc.value)}")
        if self.lambda_bar is not None and len(self.lambda_bar) != len(self.g):
            raise ParseError("lambda_bar length != number of g constraints")
        _check_ge_multiplier_exists(self)

    @property
    def ystar(self) -> Vec:
        """The multiplier target -G(xbar, ybar)."""
        return tuple(-v for v in self.g_val)

    @property
    def active(self) -> tuple:
        return tuple(i for i, gc in enumerate(self.g) if gc.value == 0)


def _check_ge_multiplier_exists(inst: GeInstance):
    """ystar must be a nonnegative active-support combination of the grads."""
    active = inst.active
    l = len(inst.g)
    grads = tuple(inst.g[i].grad for i in range(l))
    rows = tuple(tuple(grads[i][j] for i in range(l)) for j in range(inst.m))
    eq = LinearSystem(rows, inst.ystar)
    ub_rows = []
    rhs = []
    for i in range(l):
        e = [ZERO] * l
        e[i] = rat(-1)
        ub_rows.append(tuple(e))
        rhs.append(ZERO)
        if i not in active:
            e2 = [ZERO] * l
            e2[i] = rat(1)
            ub_rows.append(tuple(e2))
            rhs.append(ZERO)
    res = find_feasible(eq, LinearSystem(tuple(ub_rows), vec(rhs)))
    if not res.optimal:
        raise InfeasiblePoint(
            "0 in G(xbar,ybar) + NhatGamma(ybar)",
            "no nonnegative active-support multiplier reaches ystar",
        )


@dataclass(frozen=True)
class MpccActiveSets:
    ig: tuple
    i0plus: tuple
    i00: tuple
    iplus0: tuple


@dataclass(frozen=True)
class MpvcActiveSets:
    ig: tuple
    i0minus: tuple
    i00: tuple
    i0plus: tuple
    iplus0: tuple
    iplusminus: tuple


def active_sets(inst):
    """Classify constraint indices by exact value comparisons."""
    ig = tuple(i for i, fd in enumerate(inst.g) if fd.value == 0)
    if isinstance(inst, MpccInstance):
        i0plus, i00, iplus0 = [], [], []
        for i, (gi, hi) in enumerate(zip(inst.G, inst.H)):
            if gi.value == 0 and hi.value == 0:
                i00.append(i)
            elif gi.value == 0:
                i0plus.append(i)
            else:
                iplus0.append(i)
        return MpccActiveSets(ig, tuple(i0plus), tuple(i00), tuple(iplus0))
    if isinstance(inst, MpvcInstance):
        i0minus, i00, i0plus, iplus0, iplusminus = [], [], [], [], []
        for i, (gi, hi) in enumerate(zip(inst.G, inst.H)):
            if hi.value == 0:
                if gi.value < 0:
                    i0minus.append(i)
                elif gi.value == 0:
                    i00.append(i)
                else:
                    i0plus.append(i)
            else:
                (iplus0 if gi.value == 0 else iplusminus).append(i)
        return MpvcActiveSets(
            ig,
            tuple(i0minus),
            tuple(i00),
            tuple(i0plus),
            tuple(iplus0),
            tuple(iplusminus),
        )
    raise TypeError(f"no active sets for {type(inst).__name__}")


@dataclass(frozen=True)
class Partition:
    """beta1/beta2 split of a biactive index set."""

    beta1: tuple
    beta2: tuple


def enumerate_partitions(i00: Sequence[int], cap: int = DEFAULT_CAP) -> tuple:
    """All 2^|i00| partitions, ordered lexicographically by beta1."""
    idx = tuple(sorted(i00))
    total = 1 << len(idx)
    if total > cap:
        raise PartitionLimitExceeded(total, cap)
    subsets = []
    for mask in range(total):
        b1 = tuple(idx[k] for k in range(len(idx)) if mask >> k & 1)
        subsets.append(b1)
    subsets.sort()
    out = []
    for b1 in subsets:
        b2 = tuple(i for i in idx if i not in b1)
        out.append(Partition(b1, b2))
    return tuple(out)


# ---------------------------------------------------------------------------
# document parsing and serialization
# ---------------------------------------------------------------------------


def _fun_list(doc, key, optional=True):
    items = doc.get(key, [])
    if not isinstance(items, list):
        raise ParseError(f"{key!r} must be a list")
    out = []
    for k, entry in enumerate(items):
        try:
            out.append(FunData(rat(entry["value"]), vec(entry["grad"])))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"{key}[{k}] needs 'value' and 'grad'") from exc
    return tuple(out)


def parse_instance(document):
    """Parse a JSON document (text or dict) into a validated instance."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ParseError("instance document must be a JSON object")
    kind = document.get("kind")
    if kind not in ("mpcc", "mpvc", "ge"):
        raise ParseError(f"unknown kind {kind!r}")
    try:
        n = int(document["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError("missing or bad 'n'") from exc

    if kind in ("mpcc", "mpvc"):
        cls = MpccInstance if kind == "mpcc" else MpvcInstance
        return cls(
            n=n,
            f_grad=vec(document.get("f_grad", [])),
            h=_fun_list(document, "h"),
            g=_fun_list(document, "g"),
            G=_fun_list(document, "G"),
            H=_fun_list(document, "H"),
            ggcq_asserted=bool(document.get("ggcq_asserted", False)),
        )

    try:
        m = int(document["m"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError("ge documents need 'm'") from exc
    gees = []
    for k, entry in enumerate(document.get("g", [])):
        try:
            gees.append(
                GeConstraint(rat(entry["value"]), vec(entry["grad"]), mat(entry["hess"]))
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"g[{k}] needs 'value', 'grad', 'hess'") from exc
    tc_doc = document.get("TC", {})
    tc = HCone(mat(tc_doc.get("eq", [])), mat(tc_doc.get("ineq", [])), n)
    lam = document.get("lambda_bar")
    return GeInstance(
        n=n,
        m=m,
        f_grad=vec(document.get("f_grad", [])),
        gx=mat(document["Gx"]) if "Gx" in document else _need("Gx"),
        gy=mat(document["Gy"]) if "Gy" in document else _need("Gy"),
        g_val=vec(document["G_val"]) if "G_val" in document else _need("G_val"),
        g=tuple(gees),
        tc=tc,
        lambda_bar=None if lam is None else vec(lam),
        ggcq_asserted=bool(document.get("ggcq_asserted", False)),
    )


def _need(key):
    raise ParseError(f"ge documents need {key!r}")


def _fun_doc(fd: FunData) -> dict:
    return {"value": rat_str(fd.value), "grad": [rat_str(a) for a in fd.grad]}


def serialize(inst) -> dict:
    """Round-trip inverse of parse_instance."""
    if isinstance(inst, (MpccInstance, MpvcInstance)):
        return {
            "kind": "mpcc" if isinstance(inst, MpccInstance) else "mpvc",
            "n": inst.n,
            "f_grad": [rat_str(a) for a in inst.f_grad],
            "h": [_fun_doc(fd) for fd in inst.h],
            "g": [_fun_doc(fd) for fd in inst.g],
            "G": [_fun_doc(fd) for fd in inst.G],
            "H": [_fun_doc(fd) for fd in inst.H],
            "ggcq_asserted": inst.ggcq_asserted,
        }
    if isinstance(inst, GeInstance):
        doc = {
            "kind": "ge",
            "n": inst.n,
            "m": inst.m,
            "f_grad": [rat_str(a) for a in inst.f_grad],
            "Gx": [[rat_str(a) for a in r] for r in inst.gx],
            "Gy": [[rat_str(a) for a in r] for r in inst.gy],
            "G_val": [rat_str(a) for a in inst.g_val],
            "g": [
                {
                    "value": rat_str(gc.value),
                    "grad": [rat_str(a) for a in gc.grad],
                    "hess": [[rat_str(a) for a in r] for r in gc.hess],
                }
                for gc in inst.g
            ],
            "TC": {
                "eq": [[rat_str(a) for a in r] for r in inst.tc.eq],
                "ineq": [[rat_str(a) for a in r] for r in inst.tc.ineq],
            },
            "ggcq_asserted": inst.ggcq_asserted,
        }
        if inst.lambda_bar is not None:
            doc["lambda_bar"] = [rat_str(a) for a in inst.lambda_bar]
        return doc
    raise TypeError(f"cannot serialize {type(inst).__name__}")


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def digest(inst) -> str:
    return hashlib.sha256(canonical_json(serialize(inst)).encode()).hexdigest()
