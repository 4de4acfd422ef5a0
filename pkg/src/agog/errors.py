"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Bad arguments or config: dimension mismatch, unknown key, bad value."""


class InvalidSpecError(ConfigurationError):
    """A problem specification violates its preconditions."""


class NoUniqueOptimumError(ValueError):
    """The stationarity system of a linear-gradient instance is singular."""


class UnsupportedDiagnosticError(RuntimeError):
    """A diagnostic needs data the instance does not expose (e.g. function values)."""


class DegenerateProblemError(ValueError):
    """All smoothness constants vanish, so no stepsize is defined."""


class DivergenceError(RuntimeError):
    """An iterate became non-finite or drifted far away from the optimum.

    Attributes
    ----------
    k : int
        Last iteration index (global) at which the iterate was finite.
    result : RunResult or None
        Partial result with the trace recorded up to the failure.
    """

    def __init__(self, message, k, result=None):
        super().__init__(message)
        self.k = k
        self.result = result
