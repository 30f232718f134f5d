"""Exception types shared across the package.

Budget exhaustion is deliberately a distinct type from parameter errors:
reductions treat it as a defined outcome ("answer No"), never as a bug.
"""


class SubhError(Exception):
    """Base class for all package errors."""


class InvalidParameter(SubhError, ValueError):
    """A caller-supplied parameter violates a documented precondition."""


class IndexOutOfRange(InvalidParameter):
    """Array index outside [1, n]."""


class BudgetExhausted(SubhError):
    """A read/query was refused because it would exceed the oracle's budget.

    The refused query is not counted and its value is not revealed.
    """


class PromiseViolated(SubhError):
    """discounted_h_index bottomed out with no element satisfying the predicate."""


class UnknownVertex(InvalidParameter):
    """Vertex label outside the graph oracle's vertex set."""


class InvalidRank(InvalidParameter):
    """Neighbor rank outside [1, number of vertices]."""


class SelfPair(InvalidParameter):
    """Pair query with both endpoints equal."""


class TooLarge(InvalidParameter):
    """Instance too big for an exhaustive/naive routine."""


class InvalidConfig(InvalidParameter):
    """Malformed experiment descriptor."""
