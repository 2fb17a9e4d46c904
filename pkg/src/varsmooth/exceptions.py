"""Exception hierarchy shared across the package."""


class VarSmoothError(Exception):
    """Base class for all errors raised by varsmooth."""


class InvalidInputError(VarSmoothError, ValueError):
    """Input data violates a documented invariant (non-finite samples, bad shapes)."""


class GridMismatchError(InvalidInputError):
    """Two objects that must live on one grid do not."""


class InvalidConfigError(VarSmoothError, ValueError):
    """A parameter is outside its admissible range."""


class PreconditionError(VarSmoothError, ValueError):
    """A hypothesis of a characterization theorem does not hold.

    The message names the violated condition.
    """


class NumericFailureError(VarSmoothError, ArithmeticError):
    """An iterative solver did not converge."""


class KernelConstructionError(VarSmoothError, RuntimeError):
    """Local-means kernels could not be built with a Tauberian witness."""


class ExpressionSyntaxError(InvalidInputError):
    """Malformed exponent expression; ``offset`` is the UTF-8 byte offset."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class ExpressionDomainError(InvalidInputError):
    """Expression evaluated outside a function's domain at some grid point."""
