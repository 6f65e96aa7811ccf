"""Exception types shared across the service."""


class CranorError(Exception):
    """Base class for all service errors."""


class NotFound(CranorError):
    pass


class Conflict(CranorError):
    pass


class ValidationFailed(CranorError):
    """Raised when a descriptor or request fails validation.

    Carries the full violation list so callers can surface every problem
    at once instead of one per round-trip.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "validation failed")


class IllegalState(CranorError):
    pass


class Infeasible(CranorError):
    """Insufficient capacity. Not a fault: signals the request cannot be met."""


class NoSpectrum(Infeasible):
    pass


class FrontendBusy(CranorError):
    pass


class UnknownBandwidth(CranorError):
    pass


class OutOfOrder(CranorError):
    pass


class UnknownTask(CranorError):
    pass
