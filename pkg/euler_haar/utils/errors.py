"""
Error types shared by the exact, symbolic and command-line layers.
"""


class ParseError(ValueError):
    """Raised when textual input (expressions, JSON records, flags) cannot be parsed."""


class GuardError(RuntimeError):
    """Raised when a configured resource guard would be exceeded."""


class NonInvertibleError(ZeroDivisionError):
    """Raised on exact division by a scalar that has no inverse."""
