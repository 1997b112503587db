"""Exact rational certification of stationarity for complementarity,
vanishing-constraint, and generalized-equation programs.

Everything is decided in exact arithmetic: instances carry rational
point data, checks reduce to rational linear programs, and every
verdict ships with a certificate (multipliers or a refutation) that
re-verifies independently.
"""

__version__ = "0.1.0"

from .errors import (
    BranchLimitExceeded,
    CapExceeded,
    ConstancyNotEstablished,
    DimensionMismatch,
    GeInfeasibleAtPoint,
    InfeasiblePoint,
    InternalError,
    LambdaBarUnavailable,
    MfcqViolated,
    MpeccertError,
    ParseError,
    PartitionLimitExceeded,
    SubsetLimitExceeded,
)
from .instances import (
    GeConstraint,
    GeInstance,
    FunData,
    MpccInstance,
    MpvcInstance,
    Partition,
    active_sets,
    enumerate_partitions,
    parse_instance,
    serialize,
)
from .lp import Farkas, LinearSystem, LpResult, solve_lp, strict_feasible
from .cones import GCone, HCone, lineality, member, polar, polar_gen, relative_interior_point

__all__ = [
    "BranchLimitExceeded",
    "CapExceeded",
    "ConstancyNotEstablished",
    "DimensionMismatch",
    "Farkas",
    "FunData",
    "GCone",
    "GeConstraint",
    "GeInfeasibleAtPoint",
    "GeInstance",
    "HCone",
    "InfeasiblePoint",
    "InternalError",
    "LambdaBarUnavailable",
    "LinearSystem",
    "LpResult",
    "MfcqViolated",
    "MpccInstance",
    "MpeccertError",
    "MpvcInstance",
    "ParseError",
    "Partition",
    "PartitionLimitExceeded",
    "SubsetLimitExceeded",
    "active_sets",
    "enumerate_partitions",
    "lineality",
    "member",
    "parse_instance",
    "polar",
    "polar_gen",
    "relative_interior_point",
    "serialize",
    "solve_lp",
    "strict_feasible",
]
