"""Exception hierarchy shared by every module of the package."""


class TRAError(Exception):
    """Base class for all package errors."""


class DegenerateRoots(TRAError, ValueError):
    pass


class InvalidR(TRAError, ValueError):
    pass


class ComplexIndex(TRAError, ValueError):
    pass


class IndexOutOfRange(TRAError, ValueError):
    pass


class DegenerateIndices(TRAError, ZeroDivisionError):
    pass


class EndpointDerivative(TRAError, ValueError):
    pass


class EndpointEvaluation(TRAError, ValueError):
    pass


class NearSingularPoint(TRAError, ValueError):
    pass


class PoleInSum(TRAError, ZeroDivisionError):
    pass


class BreakdownAtN(TRAError, ZeroDivisionError):
    """A recursion coefficient vanished while advancing from degree ``n``."""

    def __init__(self, n, message=None):
        self.n = n
        super().__init__(message or f"three-term recursion breaks down at n={n}")


class NumericalFailure(TRAError, RuntimeError):
    pass


class StiffnessFailure(NumericalFailure):
    pass


class NotSymmetrizable(TRAError, ValueError):
    pass


class DeformedMeasureUnknown(TRAError, ValueError):
    pass


class ConfigError(TRAError, ValueError):
    """Malformed run configuration; ``key`` names the offending entry."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")
