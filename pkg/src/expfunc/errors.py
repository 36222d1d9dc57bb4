"""Exception and warning types shared across the package."""


class ExpFuncError(Exception):
    """Base class for all package errors."""


class DomainError(ExpFuncError, ValueError):
    """Argument outside the region where the quantity is defined."""


class NonconvergentQuadrature(ExpFuncError, ArithmeticError):
    """An adaptive quadrature did not reach its tolerance."""


class NonconvergentRootFind(ExpFuncError, ArithmeticError):
    pass


class TruncationUnbounded(ExpFuncError, ArithmeticError):
    """Contour truncation could not be certified before the node cap."""


class BudgetExceeded(ExpFuncError, RuntimeError):
    pass


class InconclusiveDiagnostic(ExpFuncError):
    """Grid diagnostic too close to its threshold to give a verdict.

    The partially filled report is attached as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConfigError(ExpFuncError, ValueError):
    """Malformed model configuration."""


class PositiveIncreaseUnverified(UserWarning):
    """Asymptotics evaluated for a spec whose positive increase was not confirmed."""
