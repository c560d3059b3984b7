"""Shared exception types."""


class ResourceError(RuntimeError):
    """Raised when a request exceeds the configured qubit or enumeration budget."""


class QctParseError(ValueError):
    """Raised on malformed QCT text; the message names the offending line."""
