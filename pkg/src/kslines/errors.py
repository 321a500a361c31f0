"""Exception types raised across the package."""

from __future__ import annotations


class KSError(Exception):
    """Base class for every library error."""


class InvalidInput(KSError):
    pass


class FamilyMismatch(KSError):
    pass


class PointNotInLine(KSError):
    pass


class EndpointsOutOfOrder(KSError):
    pass


class NoProgress(KSError):
    pass


class ExposeZero(KSError):
    pass


class JunctionMismatch(KSError):
    pass


class TagAbsent(KSError):
    pass


class NotContinuousDeclared(KSError):
    pass


class NotRegulated(KSError):
    pass


class NotNBV(KSError):
    pass


class UnsupportedSet(KSError):
    pass


class UnsupportedLine(KSError):
    pass


class InvalidRegularity(KSError):
    pass


class NotAmenable(KSError):
    pass


class NotNondecreasing(KSError):
    pass


class SystemNotFine(KSError):
    pass


class NotGDifferentiable(KSError):
    """Raised with ``kind`` in GConstant, NotRightContinuous, NoStabilization, LeftJumpMismatch."""

    def __init__(self, kind: str, point=None, detail: str = ""):
        self.kind = kind
        self.point = point
        msg = f"{kind} at {point}" if point is not None else kind
        super().__init__(f"{msg}: {detail}" if detail else msg)


class ProbeFailed(KSError):
    pass


class PreconditionViolated(KSError):
    def __init__(self, point, detail: str = ""):
        self.point = point
        super().__init__(f"exception point {point} is left-isolated and not the minimum" + (f": {detail}" if detail else ""))


class OverlappingSets(KSError):
    pass


class HypothesisViolated(KSError):
    def __init__(self, mode: str, point, index: int, detail: str = ""):
        self.mode = mode
        self.point = point
        self.index = index
        super().__init__(f"{mode} hypothesis fails at point {point}, index {index}" + (f": {detail}" if detail else ""))


class NotAdmissible(KSError):
    def __init__(self, point, witness):
        self.point = point
        self.witness = witness
        super().__init__(f"family is not admissible at {point}")


class SeriesDivergent(KSError):
    pass
