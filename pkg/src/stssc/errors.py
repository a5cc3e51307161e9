"""Exception types shared across the package."""


class ConfigurationError(Exception):
    """Invalid configuration (unknown code name, incompatible N/M/constellation, ...)."""


class UsageError(ValueError):
    """An API call violated a precondition (dimension mismatch, index out of range, ...)."""


class ConsistencyError(RuntimeError):
    """An internal invariant was violated (e.g. a hard demapper fed a non-constellation point)."""
