"""Exception types shared across the package."""


class ClockSyncError(Exception):
    """Base class for all package-specific errors."""


class DegenerateDesign(ClockSyncError):
    """Fit requested on data that cannot determine the model (too few
    points, or all abscissae identical)."""


class NonConvergence(ClockSyncError):
    """Solver failed to reach the requested tolerance.

    Carries the best iterate found so far in ``best_estimate`` (may be None).
    """

    def __init__(self, message, best_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate


class EmptyResult(ClockSyncError):
    """Filtering removed every point; the input is considered corrupt."""


class ParseError(ClockSyncError):
    """Config or log document is structurally invalid.

    ``path`` locates the offending key (dotted path).
    """

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class ValidationError(ClockSyncError):
    """A parsed value violates a documented invariant."""


class InsufficientData(ClockSyncError):
    """Not enough records for the requested analysis."""
