"""Exception hierarchy shared by every btfkit module.

The CLI maps these onto process exit codes: configuration and shape
problems exit 2, malformed or invalid files exit 3, numeric failures
exit 4.
"""


class BtfkitError(Exception):
    """Base class for all btfkit errors."""


class ConfigError(BtfkitError):
    """Invalid configuration value or unusable combination of settings."""


class DimensionError(BtfkitError):
    """Array shape violates an operation contract (axes, strides, multiples)."""


class FormatError(BtfkitError):
    """Malformed container bytes. Carries the offending byte offset when known."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class ValidationError(BtfkitError):
    """Well-formed data that violates a domain invariant (NaN, negative radiance, ...)."""


class PairLookupError(BtfkitError):
    """Requested direction pair is not sampled in the dataset."""


class DomainError(BtfkitError):
    """Numeric operation evaluated outside its mathematical domain."""


class NumericsError(BtfkitError):
    """Non-finite values appeared where finite ones are required (e.g. diverged loss)."""


class GraphError(BtfkitError):
    """Autodiff contract violation (non-scalar loss, tape misuse)."""
