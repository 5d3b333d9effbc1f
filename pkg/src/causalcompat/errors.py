"""Shared exception types.

Every deliberate failure mode in the package raises one of these, so callers
(CLI, service) can map them to exit codes / HTTP statuses uniformly.
"""


class ArgumentError(ValueError):
    """Caller violated a documented precondition."""


class ConditioningError(ArgumentError):
    """Conditioning on a zero-probability event."""


class UnsupportedInterventionError(ArgumentError):
    """Table-backed model has no table for the requested intervention set."""


class SolveError(ArgumentError):
    """Fixed-point solving failed (names the exogenous assignment)."""


class ConfigurationError(ArgumentError):
    """Scenario/embedding input does not satisfy the required configuration."""


class ResourceError(RuntimeError):
    """Requested computation exceeds a documented size cap."""


class ModelFileError(ValueError):
    """Malformed model file; message carries the offending line/section."""
