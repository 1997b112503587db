"""Hand-checked worked instances shared across test modules.

* `biactive_descent_case`: three variables, two active inequalities and
  one biactive pair; the point admits a unique limiting multiplier
  (1, 3, 0, -2) but a feasible descent direction exists, so every
  concept stronger than limiting stationarity fails.

* `double_pair_case`: four variables, two active inequalities, two
  biactive pairs; its kernel subspace is one where the partition
  sign-product qualification holds on the doubly-nonsingular set while
  the older comparison condition fails for both partitions.
"""

from mpeccert.instances import FunData, MpccInstance, MpvcInstance
from mpeccert.rationals import ZERO, vec


def fd(value, grad):
    from mpeccert.rationals import rat

    return FunData(rat(value), vec(grad))


def biactive_descent_case() -> MpccInstance:
    # min x1 + x2 - 2 x3, -x1 - x3 <= 0, -x2 + x3 <= 0, pair (x1, x2)
    return MpccInstance(
        n=3,
        f_grad=vec([1, 1, -2]),
        h=(),
        g=(fd(0, [-1, 0, -1]), fd(0, [0, -1, 1])),
        G=(fd(0, [1, 0, 0]),),
        H=(fd(0, [0, 1, 0]),),
        ggcq_asserted=True,
    )


def biactive_descent_document() -> dict:
    return {
        "kind": "mpcc",
        "n": 3,
        "f_grad": ["1", "1", "-2"],
        "h": [],
        "g": [
            {"value": "0", "grad": ["-1", "0", "-1"]},
            {"value": "0", "grad": ["0", "-1", "1"]},
        ],
        "G": [{"value": "0", "grad": ["1", "0", "0"]}],
        "H": [{"value": "0", "grad": ["0", "1", "0"]}],
        "ggcq_asserted": True,
    }


def double_pair_case(f_grad=None) -> MpccInstance:
    # -x3 - x4 <= 0, x2 <= 0, pairs (x1, x2) and (x1 + x3, x4)
    return MpccInstance(
        n=4,
        f_grad=vec(f_grad if f_grad is not None else [0, 0, 0, 0]),
        h=(),
        g=(fd(0, [0, 0, -1, -1]), fd(0, [0, 1, 0, 0])),
        G=(fd(0, [1, 0, 0, 0]), fd(0, [1, 0, 1, 0])),
        H=(fd(0, [0, 1, 0, 0]), fd(0, [0, 0, 0, 1])),
        ggcq_asserted=True,
    )


def single_pair_min_first_case() -> MpccInstance:
    # min x1 with one pair (x1, x2) at the origin: strongly stationary
    return MpccInstance(
        n=2,
        f_grad=vec([1, 0]),
        h=(),
        g=(),
        G=(fd(0, [1, 0]),),
        H=(fd(0, [0, 1]),),
        ggcq_asserted=True,
    )


def vanishing_pair_case(sign: int) -> MpvcInstance:
    # min sign * x1 with H = x1, G = x2 at the origin
    return MpvcInstance(
        n=2,
        f_grad=vec([sign, 0]),
        h=(),
        g=(),
        G=(fd(0, [0, 1]),),
        H=(fd(0, [1, 0]),),
        ggcq_asserted=True,
    )
