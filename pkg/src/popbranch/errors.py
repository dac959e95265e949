"""Exception types shared across the package."""


class PopbranchError(Exception):
    """Base class for every error raised by this package."""


class InstanceError(PopbranchError, ValueError):
    """Invalid instance data: graph structure, weights, or preferences."""


class DuplicateId(InstanceError):
    pass


class SelfLoop(InstanceError):
    pass


class UnknownEndpoint(InstanceError):
    pass


class MissingWeight(InstanceError):
    pass


class NonpositiveWeight(InstanceError):
    pass


class MissingRank(InstanceError):
    pass


class HeadMismatch(InstanceError):
    """Two edges with different head vertices were compared."""


class SchemaError(InstanceError):
    """Malformed instance or result file. ``path`` is a JSON-pointer-style
    location of the offending element."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.reason = message


class CapExceeded(PopbranchError):
    """An enumeration produced more items than the configured cap."""


class LaminarityViolation(PopbranchError):
    """A solver invariant on the reach-set family failed.

    This indicates a bug in the solver, not bad input.
    """


class InternalError(PopbranchError):
    """An internal consistency check failed; indicates a bug."""
