"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so new failure modes should subclass one
of them rather than raising bare ``ValueError``.
"""


class FuncSGDError(Exception):
    """Base class for all library errors."""


class ValidationError(FuncSGDError, ValueError):
    """Inputs violate a documented precondition (shape, sign, ordering)."""


class DomainError(ValidationError):
    """A scalar parameter lies outside the domain of a formula."""


class IllPosedError(ValidationError):
    """The requested quantity is undefined for the given model."""


class UnsupportedError(FuncSGDError):
    """The configuration is valid but this code path does not support it."""


class NumericError(FuncSGDError, ArithmeticError):
    """Non-finite values or a quadrature that failed to converge."""

    def __init__(self, message, *, step=None, achieved=None):
        super().__init__(message)
        self.step = step
        self.achieved = achieved
