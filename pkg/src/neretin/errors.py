"""Exception types shared across the package."""


class NeretinError(Exception):
    pass


class NotALeaf(NeretinError, ValueError):
    pass


class ArityMismatch(NeretinError, ValueError):
    pass


class InfeasibleLeafCount(NeretinError, ValueError):
    pass


class BoundExceeded(NeretinError):
    pass


class NotExpandable(NeretinError, ValueError):
    pass


class BudgetExceeded(NeretinError):
    pass


class ParityUndefined(NeretinError, ValueError):
    pass


class CongruenceFailure(NeretinError, ValueError):
    pass


class NoCollapsibleVertex(NeretinError, ValueError):
    pass


class NotANeighbor(NeretinError, ValueError):
    pass


class CapExceeded(NeretinError):
    pass


class SizeExceeded(NeretinError):
    pass


class LabelCollision(NeretinError, ValueError):
    pass


class NotMedian(NeretinError, ValueError):
    def __init__(self, triple, message=None):
        self.triple = triple
        super().__init__(message or f"no unique median for {triple!r}")


class InternalInconsistency(NeretinError, AssertionError):
    pass


class NotBijectiveOnRationalPoints(NeretinError, ValueError):
    def __init__(self, message, point=None):
        self.point = point
        super().__init__(message)


class PositionMismatch(NeretinError, ValueError):
    pass


class UnsupportedMap(NeretinError, ValueError):
    pass


class ParseError(NeretinError, ValueError):
    pass
