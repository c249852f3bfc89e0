"""Exception types shared across the package."""

__all__ = ["GraphFormatError", "StructureError"]


class GraphFormatError(ValueError):
    """Malformed graph file content.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class StructureError(ValueError):
    """A structural precondition does not hold.

    Raised when an input violates what an algorithm requires of it
    (wrong regularity, disconnected where connectivity is needed, an
    arc set that is not a cycle cover, and so on).
    """
