"""Exception types shared across the package."""


class PLGroupError(Exception):
    """Base class for all package-specific errors."""


class DomainError(PLGroupError, ValueError):
    """A point lies outside the domain of a map."""


class NotPL2Error(PLGroupError, ValueError):
    """Data does not describe a PL map with dyadic breakpoints and power-of-2 slopes."""


class ResourceLimitError(PLGroupError, RuntimeError):
    """A configurable resource budget (elements, breakpoints, exponent depth) was exceeded."""


class DecodeError(PLGroupError, ValueError):
    """Malformed or non-canonical serialized bytes."""


class InternalConsistencyError(PLGroupError, AssertionError):
    """An invariant the implementation guarantees was violated; indicates a bug."""


class ProtocolError(PLGroupError, RuntimeError):
    """Wire-protocol violation: unexpected frame, version or digest mismatch."""
