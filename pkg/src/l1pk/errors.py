"""Exception types raised across the package."""


class ShapeError(ValueError):
    """Operand dimensions are incompatible."""


class StructureError(ValueError):
    """A tensor lacks the structure an operation requires (e.g. not block circulant)."""


class TransformError(ValueError):
    """A transform matrix is singular or not a scaled unitary."""


class RealifyError(ArithmeticError):
    """The imaginary part left after an inverse transform is too large to drop."""


class DivergenceError(ArithmeticError):
    """A solver iterate became non-finite."""

    def __init__(self, iteration, message=None):
        self.iteration = iteration
        super().__init__(message or f"non-finite iterate at iteration {iteration}")


class FormatError(ValueError):
    """A HOT1 file or config file is malformed."""
