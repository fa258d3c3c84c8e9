"""Exception types raised across the package."""


class SparsifyError(Exception):
    """Base class for all package errors."""


class DomainTooLargeError(SparsifyError, ValueError):
    """An enumeration would exceed its size guard (pass ``force=True`` to override)."""


class NotMonotoneError(SparsifyError, ValueError):
    """A function expected to be monotone has a negative marginal gain."""


class HypothesisError(SparsifyError, ValueError):
    """A structural precondition of an algorithm does not hold.

    Examples are curvature equal to one for the curvature engine, or ``k >= 2``
    for the bounded-arity engine.
    """


class SupportError(SparsifyError, ValueError):
    """A declared effective support does not match the function."""
