"""Exception hierarchy shared across the package."""


class DdcaError(Exception):
    """Base class for all errors raised by this package."""


class StreamFormatError(DdcaError):
    """A stream file row could not be parsed; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DimensionalityError(DdcaError):
    """A signal vector or weight row does not match the configured dimensionality."""


class DomainError(DdcaError):
    """A value is outside the mathematical domain of an operation."""


class ConfigurationError(DdcaError):
    """Invalid run configuration (weights, lifespans, segment size, generator spec)."""


class IntervalRangeError(DdcaError):
    """A measurement interval does not lie within the recorded run."""
