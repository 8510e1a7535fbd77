"""Exception types shared across the package."""


class IcanCleanError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(IcanCleanError):
    """Input data violates a basic contract (non-finite values, bad labels)."""


class ShapeError(IcanCleanError):
    """Operands have incompatible shapes or are misaligned in time."""


class InsufficientSamplesError(IcanCleanError):
    """Too few samples for the requested decomposition."""


class DegenerateInputError(IcanCleanError):
    """An input block has numerical rank zero."""


class ConfigurationError(IcanCleanError):
    """A configuration value is invalid or unsupported for the operation."""


class ParseError(IcanCleanError):
    """A recording file does not conform to the CSV contract."""
