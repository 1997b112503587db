"""Exception hierarchy shared by all modules."""


class MpeccertError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(MpeccertError):
    """Vectors or matrices with inconsistent shapes were combined."""


class ParseError(MpeccertError):
    """An instance document is malformed (bad rationals, shapes, or keys)."""


class InfeasiblePoint(MpeccertError):
    """The reference point violates a constraint of its own instance."""

    def __init__(self, constraint: str, detail: str = ""):
        self.constraint = constraint
        msg = f"reference point is infeasible: {constraint}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class CapExceeded(MpeccertError):
    """An enumeration grew past the configured cap."""

    def __init__(self, what: str, needed: int, cap: int):
        self.what = what
        self.needed = needed
        self.cap = cap
        super().__init__(f"{what} would need {needed} items, cap is {cap}")


class PartitionLimitExceeded(CapExceeded):
    def __init__(self, needed: int, cap: int):
        super().__init__("partition enumeration", needed, cap)


class BranchLimitExceeded(CapExceeded):
    def __init__(self, needed: int, cap: int):
        super().__init__("branch enumeration", needed, cap)


class SubsetLimitExceeded(CapExceeded):
    def __init__(self, needed: int, cap: int):
        super().__init__("subset enumeration", needed, cap)


class MfcqViolated(MpeccertError):
    """No direction strictly decreases every active inequality at the point."""


class GeInfeasibleAtPoint(MpeccertError):
    """The generalized equation has no Lagrange multiplier at the point."""


class LambdaBarUnavailable(MpeccertError):
    """No base multiplier could be selected for the curvature term."""


class ConstancyNotEstablished(MpeccertError):
    """The directional multiplier map could not be certified constant."""


class InternalError(MpeccertError):
    """A certified invariant failed to re-verify; indicates a library defect."""
