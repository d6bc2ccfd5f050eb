"""Exception hierarchy. Every error raised on bad input is a ``ValueError``."""


class ToricError(ValueError):
    pass


class LatticeError(ToricError):
    pass


class NotSublattice(LatticeError):
    pass


class ZeroVector(LatticeError):
    pass


class NotInLattice(LatticeError):
    """Raised when a vector is not a lattice point.

    ``primitive`` holds the primitive generator of the ray through the
    vector, which is still meaningful.
    """

    def __init__(self, message, primitive=None):
        super().__init__(message)
        self.primitive = primitive


class DegenerateCone(ToricError):
    pass


class UnboundedSlice(ToricError):
    pass


class CapExceeded(ToricError):
    def __init__(self, message, cap=None):
        super().__init__(message)
        self.cap = cap


class NotInterior(ToricError):
    pass


class NotPrimitive(ToricError):
    pass


class NotInCone(ToricError):
    pass


class NotQGorenstein(ToricError):
    pass


class NotKlt(ToricError):
    pass


class LatticeMismatch(ToricError):
    pass


class NotInUpstairsLattice(ToricError):
    pass


class OrderCapExceeded(ToricError):
    pass


class OutOfRange(ToricError):
    pass


class VerificationFailure(AssertionError):
    """An internal consistency check failed; this indicates a bug, not bad input."""
