"""Exception types shared across the package."""


class SkewMFError(Exception):
    """Base class for all package errors."""


class ConfigurationError(SkewMFError):
    """Invalid grid / problem / run configuration."""


class ContractViolation(SkewMFError):
    """An operation was called with input violating its contract
    (e.g. a field that is not mean-zero where one is required)."""


class ConvergenceError(SkewMFError):
    """An iterative solver failed to reach its tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ResolutionError(SkewMFError):
    """Requested feature is too fine for the grid resolution."""


class PathError(SkewMFError):
    """A continuation path violates its admissibility constraints."""


class UnboundedDescentError(SkewMFError):
    """Outer minimization detected unbounded descent (wrong parameter regime)."""
