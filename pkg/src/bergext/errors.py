"""Exception types shared across the package."""


class BergextError(Exception):
    """Base class for all package errors."""


class ParameterError(BergextError):
    """Invalid argument (orders, ratios, degrees, unknown options)."""


class DegeneracyError(BergextError):
    """Numerically singular Gram matrix / non-integrable weight.

    Raised when the weight's singular part kills monomials of the truncated
    space, or when the (scaled) Gram condition number exceeds COND_LIMIT.
    """

    def __init__(self, message, offending_monomials=None):
        super().__init__(message)
        self.offending_monomials = list(offending_monomials or [])


class EvaluationError(BergextError):
    """Non-finite integrand value at a quadrature node, or evaluation at a
    singular point of a weight where a derivative was requested."""


COND_LIMIT = 1e14
