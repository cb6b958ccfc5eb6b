"""Exception hierarchy for sqrtpool."""


class PoolingError(Exception):
    """Base class for every error raised by the package."""


class InvalidDensity(PoolingError, ValueError):
    pass


class InvalidPanel(PoolingError, ValueError):
    pass


class DisjointSupports(InvalidPanel):
    pass


class BoundaryPoint(PoolingError, ValueError):
    pass


class InfiniteInformation(PoolingError, ValueError):
    """The integral of the squared derivative of a square-root density diverges."""


class QuadratureFailure(PoolingError, ArithmeticError):
    pass


class DegenerateGram(PoolingError, ArithmeticError):
    pass


class DegenerateDirection(PoolingError, ArithmeticError):
    pass


class SingularTransform(PoolingError, ArithmeticError):
    pass


class InvalidRange(PoolingError, ValueError):
    pass


class Cancelled(PoolingError):
    """Raised when a caller-supplied cancellation check returns True."""
