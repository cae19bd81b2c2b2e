"""Exception types shared across the package."""


class FedmpError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(FedmpError):
    """Operand dimensions are incompatible."""


class NumericError(FedmpError):
    """A computation produced non-finite values."""


class ProtocolError(FedmpError):
    """A protocol precondition was violated (empty set, too few samples, ...)."""


class WireError(FedmpError):
    """A wire message failed to encode, decode, or round-trip."""


class FormatError(WireError):
    """A byte stream does not conform to its declared format.

    ``offset`` is the byte position at which decoding failed, when known.
    """

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class ConfigError(FedmpError):
    """An experiment configuration is invalid or incomplete."""
