"""Exception types shared across the package."""


class CrossDimError(Exception):
    """Base class for all crossdim errors."""


class DimensionOverflowError(CrossDimError):
    """A derived dimension exceeded the supported limit.

    Carries ``step`` when raised inside a simulation, so callers can report
    where a dimension-unbounded trajectory blew up.
    """

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class ShapeMismatchError(CrossDimError):
    """Operands do not conform for a conventional matrix operation."""


class ShapeClassMismatchError(CrossDimError):
    """M-addition operands have different reduced row/column ratios."""


class SingularMatrixError(CrossDimError):
    """Matrix inversion hit a numerically zero pivot."""


class ConvergenceError(CrossDimError):
    """An iterative method exhausted its iteration budget."""


class NotDimensionBoundedError(CrossDimError):
    """Operation requires rows to divide columns (dimension-bounded operator)."""


class InvarianceError(CrossDimError):
    """The requested state dimension is not invariant under the operator."""


class UnsupportedFeatureError(CrossDimError):
    """The request is deliberately outside the supported scope."""


class ParseError(CrossDimError):
    """A data file could not be parsed into the expected schema."""
