"""Exception hierarchy.

Structural problems found by the validators are *reported*, not raised; the
exceptions below are for contract violations at construction or solve time.
"""

from __future__ import annotations


class VodError(Exception):
    """Base class for every error raised by this package."""


# graph construction
class DuplicateEntityError(VodError):
    pass


class EdgeEndpointMissingError(VodError):
    pass


class NonPositiveCapacityError(VodError):
    pass


class NoSubscribersError(VodError):
    pass


class NoServersError(VodError):
    pass


class NonAdjacentLayerError(VodError):
    pass


# demand
class UnknownContentError(VodError):
    pass


class UnknownSubscriberError(VodError):
    pass


class UnknownServerError(VodError):
    pass


class SourceNotOnLayer1Error(VodError):
    pass


# flow / routing
class InvalidPathError(VodError):
    pass


class UnmappedEdgeError(VodError):
    pass


class DiscontinuousMappingError(VodError):
    pass


class LoopingExpansionError(VodError):
    pass


# synthesis
class MissingSuperSourceError(VodError):
    pass


class NoCommoditiesError(VodError):
    pass


class IterationLimitExceededError(VodError):
    pass


class NodeLimitExceededError(VodError):
    pass


class TooLargeForOracleError(VodError):
    pass


class NotOptimalError(VodError):
    pass


# scenario files
class ScenarioError(VodError):
    """A scenario file could not be accepted.

    Attributes:
        location: where the problem is, e.g. ``"line 3"`` or
            ``"requests[2].content"``.
    """

    def __init__(self, message: str, location: str = "") -> None:
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class ScenarioSyntaxError(ScenarioError):
    pass


class UnknownFieldError(ScenarioError):
    pass


class SchemaViolationError(ScenarioError):
    pass
