"""Exception types raised by merchmath."""


class MerchMathError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(MerchMathError, ValueError):
    """A parameter lies outside its documented domain."""


class QuadratureError(MerchMathError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance.

    Attributes:
        estimate: best integral estimate found.
        error: error bound attached to ``estimate``.
    """

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SolverError(MerchMathError, ArithmeticError):
    """A root finder or fixed-point solver failed."""


class NoFixedPointError(SolverError):
    """g(a) = rho(a) - a never changes sign on the search bracket."""


class NoEquilibriumError(SolverError):
    """Supply and demand curves do not cross."""


class DegenerateStrategyError(MerchMathError):
    """The rational side of the cycle is (numerically) never accepted."""


class DegenerateLineError(MerchMathError, ValueError):
    """Both portfolio points coincide, so no line joins them."""
