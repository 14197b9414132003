"""Exception hierarchy shared across the package.

Every error that callers are expected to catch subclasses DegdivError, so the
CLI can map the family to exit codes (usage -> 2, capability -> 3,
construction -> 4) without enumerating leaf types.
"""


class DegdivError(Exception):
    """Base class for all package errors."""


class UsageError(DegdivError):
    """Bad parameters or malformed input (CLI exit code 2)."""


class InvalidParams(UsageError):
    pass


class InvalidSet(UsageError):
    """A vertex set refers to indices outside the host graph."""


class InvalidPair(UsageError):
    """An operation on two vertices received u == v."""


class InvalidDomain(UsageError):
    """A probability vector or distribution does not cover the requested set."""


class InsufficientTrials(UsageError):
    pass


class InvalidWitness(UsageError):
    """A witness object failed its structural invariant."""


class CapabilityError(DegdivError):
    """Request exceeds a configured capability (CLI exit code 3)."""


class TooLarge(CapabilityError):
    """Instance exceeds an exact-oracle cap; caps are config, never silently relaxed."""


class ConstructionError(DegdivError):
    """A randomized construction could not satisfy its postcondition (exit code 4)."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class InsufficientDegree(ConstructionError):
    """Bounded-degree greedy ran out of high-degree vertices.

    ``placed`` reports how many anchors were placed before the failure and
    ``partial`` carries the best partial witness assembled so far.
    """

    def __init__(self, message: str, placed: int = 0, partial=None):
        super().__init__(message, partial=partial)
        self.placed = placed


class NotDiverse(ConstructionError):
    pass


class NotConvenient(ConstructionError):
    pass


class SeparationFailed(ConstructionError):
    pass


class RealizationFailed(ConstructionError):
    pass


class NotPrivate(ConstructionError):
    pass


class ConstructionFailed(ConstructionError):
    pass
