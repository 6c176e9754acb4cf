"""Exception types shared across the package."""


class ConvexestError(Exception):
    """Base class for all package errors."""


class DegenerateInput(ConvexestError):
    """Input is geometrically degenerate (too few points, collinear, zero area)."""


class DimensionMismatch(ConvexestError):
    """Point dimension does not match the support's dimension."""


class UnsupportedDimension(ConvexestError):
    """Operation is not defined for supports of this dimension."""


class UnsupportedCombination(ConvexestError):
    """No exact formula for this pair of supports."""


class InvalidParameters(ConvexestError):
    """Parameters violate a documented precondition."""


class CheckFailed(ConvexestError):
    """A verification identity did not hold."""


class InsufficientData(ConvexestError):
    """Not enough rows or points to carry out the computation."""


class ParseError(ConvexestError):
    """Malformed input file or config text."""


class ValidationError(ConvexestError):
    """Config parsed but one or more fields are invalid."""
