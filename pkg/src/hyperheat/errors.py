"""Exception types shared across the package."""


class NumericalError(ArithmeticError):
    """A numerical procedure could not deliver a trustworthy value."""


class QuadratureError(NumericalError):
    """Quadrature failed to meet its tolerance (or hit a NaN)."""
