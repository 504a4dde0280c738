"""Exception types shared across the package."""


class PolySampleError(Exception):
    """Base class for all package-specific errors."""


class SizeGuardError(PolySampleError):
    """An operation was rejected because it exceeds a desk-scale size guard.

    Guards are checked arithmetically before any large allocation happens,
    so hitting one is cheap. The CLI maps this to exit status 3.
    """


class InvalidMonomialError(PolySampleError, ValueError):
    """A monomial mask violates its family's structural invariant."""


class ParityError(PolySampleError, ValueError):
    """An integer assignment violates the value-parity constraint v_i = k (mod 2)."""


class ShapeMismatchError(PolySampleError, ValueError):
    """Two tables (or a table and a query) disagree on radix or length."""


class NumericalCheckError(PolySampleError):
    """An internal exactness or tolerance self-check failed.

    Raised when a constructed object contradicts an identity it is supposed
    to satisfy (table normalization, transform unitarity, ...). This signals
    a bug in the inputs or the library, never an expected runtime condition.
    """
