"""Exception hierarchy shared by all quadsum modules."""


class QuadsumError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(QuadsumError):
    """An argument violates an operation's precondition."""


class ResourceLimitError(QuadsumError):
    """A configured cap (points, entries, memory) would be exceeded."""


class EmptyMeasureError(QuadsumError):
    """A normalized measure was requested over an empty point set."""
