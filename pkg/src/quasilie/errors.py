"""Exception hierarchy shared by every layer of the package."""


class QuasiLieError(Exception):
    """Base class for all errors raised by quasilie."""


class DivisionByZeroFunction(QuasiLieError, ZeroDivisionError):
    pass


class UnknownVariable(QuasiLieError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class DimensionMismatch(QuasiLieError, ValueError):
    pass


class PoleError(QuasiLieError, ArithmeticError):
    pass


class DomainError(QuasiLieError, ValueError):
    pass


class ExpressionSyntaxError(QuasiLieError, SyntaxError):
    """Malformed time expression; ``position`` is the 0-based column."""

    def __init__(self, message, position=None, source=None):
        self.position = position
        self.source = source
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class UnknownFunction(QuasiLieError, NameError):
    pass


class NotExact(QuasiLieError, ValueError):
    """An exact evaluation hit an irrational or otherwise inexact value."""


class LinearDependence(QuasiLieError, ValueError):
    pass


class SingularJacobian(QuasiLieError, ArithmeticError):
    pass


class MissingDerivative(QuasiLieError, ValueError):
    pass


class IntegrationFailure(QuasiLieError, RuntimeError):
    pass


class StepUnderflow(IntegrationFailure):
    """Step size collapsed; ``component`` names the state coordinate at fault."""

    def __init__(self, message, t=None, component=None):
        super().__init__(message)
        self.t = t
        self.component = component


class MaxStepsExceeded(IntegrationFailure):
    pass


class BranchCrossing(QuasiLieError, ArithmeticError):
    pass


class WindowError(QuasiLieError, ValueError):
    pass


class NotASolution(QuasiLieError, ValueError):
    pass


class ZeroCrossing(QuasiLieError, ValueError):
    pass


class NonConvergence(QuasiLieError, ArithmeticError):
    pass


class ModelFileError(QuasiLieError, ValueError):
    """A JSON model file is malformed or references something undefined."""
