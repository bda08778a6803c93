"""Exception types shared across the package."""


class SpinwaveError(Exception):
    """Base class for package errors."""


class ParameterError(SpinwaveError):
    """A physical or grid parameter violates its constraints."""


class ConfigError(SpinwaveError):
    """A run configuration file or flag set could not be validated."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class TransportNodeError(SpinwaveError):
    """The unit-field response vanishes at the requested point.

    The amplitude-forwarding solve is ill-conditioned on a node of the
    wave; retry with a different application time.
    """


class OutputError(SpinwaveError):
    """An artifact could not be written."""
