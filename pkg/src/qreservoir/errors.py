"""Package-level error types, mapped to CLI exit codes."""


class QReservoirError(Exception):
    """Base class for package errors."""


class ConfigError(QReservoirError):
    """Invalid or inconsistent configuration input (CLI exit code 2)."""


class ToleranceError(QReservoirError):
    """A numerical tolerance was violated, e.g. trace drift or positivity
    loss signalling a too-large integration step (CLI exit code 3)."""
