"""Exception types shared across the package."""


class BellquenchError(Exception):
    """Base class for package-specific errors."""


class ResourceCapError(BellquenchError):
    """Requested system size exceeds the dense-solver cap."""


class DegenerateGroundStateError(BellquenchError):
    """A momentum block has an exactly degenerate ground doublet (strict mode)."""


class ThresholdUndefinedError(BellquenchError):
    """A phase diagram has no cross-phase cells, so no threshold exists."""


class InconsistentCorrelatorsError(BellquenchError):
    """Correlators do not define a positive semidefinite two-qubit state."""


class FitFailedError(BellquenchError):
    """No optimizer start converged to a usable fit."""

    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


class ConfigError(BellquenchError):
    """Invalid run configuration (bad key, bad value, malformed file)."""
