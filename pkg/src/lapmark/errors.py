"""Exception types shared across the package.

The CLI maps these onto exit codes: format/parse problems exit with 1,
capacity and configuration problems with 2.
"""


class FormatError(ValueError):
    """Malformed input data: bad stream syntax, mismatched dimensions."""


class Y4MParseError(FormatError):
    """YUV4MPEG2 stream could not be parsed; carries the failing byte offset."""

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} (byte offset {byte_offset})")
        self.byte_offset = byte_offset


class CapacityError(ValueError):
    """Requested payload exceeds what the carrier can hold."""


class ConfigError(ValueError):
    """Invalid parameter combination (bad grid step, empty sweep, ...)."""


class ResourceLimitError(RuntimeError):
    """Computation would exceed a hard size limit; lower the resolution."""
