"""Exception types raised by the series kernel and the solvers."""


class RecintError(Exception):
    """Base class for every error raised by this package."""


class SeriesMismatchError(RecintError, ValueError):
    """Two series with different base points or orders were combined."""


class SingularBasePointError(RecintError, ZeroDivisionError):
    """A reciprocal was requested of a series that vanishes at its base point."""


class NumericRangeError(RecintError, ArithmeticError):
    """A coefficient overflowed or became non-finite."""


class IterationLimitError(RecintError, RuntimeError):
    """A fixed-point iteration did not stabilize within its iteration budget."""


class InvalidParameterError(RecintError, ValueError):
    """A catalog constructor received parameters outside its domain."""
