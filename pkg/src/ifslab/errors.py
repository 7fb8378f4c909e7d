"""Exception hierarchy shared across the package."""


class IfsLabError(Exception):
    """Base class for all ifslab errors."""


class DomainError(IfsLabError):
    """A point or interval falls outside the ambient domain, or is malformed."""


class EmptySetError(IfsLabError):
    """An operation that requires a nonempty set received the empty sentinel."""


class ParameterError(IfsLabError):
    """A tolerance, budget or other scalar parameter is out of range."""


class PartOverflowError(IfsLabError):
    """An interval set exceeded the hard cap on the number of parts."""


class BudgetError(IfsLabError):
    """A search or iteration exhausted its budget.

    The partial result computed so far, when one exists, is attached as
    the ``partial`` attribute.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class PreconditionError(IfsLabError):
    """A documented operation precondition does not hold for the inputs."""


class StructureError(IfsLabError):
    """A transition matrix lacks the required structure (e.g. irreducibility)."""


class ConvergenceError(IfsLabError):
    """An iteration failed to converge within its allotted steps."""


class UnsupportedMapError(IfsLabError):
    """The operation needs piecewise-linear maps and got something else."""


class GridMismatchError(IfsLabError):
    """Two grid measures do not share a common grid."""


class DegenerateOutputError(IfsLabError):
    """Sampling produced no usable output (e.g. every sample unresolved).

    Carries the observed ``unresolved_fraction``.
    """

    def __init__(self, message, unresolved_fraction=None):
        super().__init__(message)
        self.unresolved_fraction = unresolved_fraction


class ConstructionError(IfsLabError):
    """A map or IFS violates its construction invariants."""
