"""Exception hierarchy shared by every ppsim module."""


class PPSimError(Exception):
    """Base class for all ppsim errors."""


class InvalidArgumentError(PPSimError, ValueError):
    pass


class EmptySchedulerError(PPSimError, IndexError):
    pass


class CorruptedIntensityError(PPSimError, ArithmeticError):
    """An intensity scheduler encodes a level below the clamping tolerance."""


class DominationError(PPSimError, RuntimeError):
    """Thinning could not accept a candidate (bound violated or rejection cap hit)."""


class StationarityError(PPSimError, ValueError):
    """Interaction matrix has spectral radius >= 1 or I - H is singular."""


class NumericError(PPSimError, ArithmeticError):
    pass


class CausalityError(PPSimError, ValueError):
    """A point was applied before the current time of an intensity scheduler."""


class InsufficientSampleError(PPSimError, ValueError):
    pass


class DegenerateSampleError(PPSimError, ValueError):
    pass


class OracleInconsistencyError(PPSimError, RuntimeError):
    pass


class InvariantViolation(PPSimError, RuntimeError):
    """Internal consistency check failed (debug mode or output validation)."""


class GraphDiscarded(PPSimError):
    """Graph rejected by the balancing rules: explosive H or a negative spontaneous rate."""

    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason
