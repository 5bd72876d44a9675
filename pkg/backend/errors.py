"""
Exception hierarchy for gti-asym.

Domain errors mean "this input is outside what the method covers" and map to
CLI exit code 2. Numerical failures mean "the input was fine but a numerical
procedure did not deliver" and map to exit code 3.
"""


class GTIAsymError(Exception):
    """Base class for every error raised by the library."""


class DomainError(GTIAsymError, ValueError):
    pass


class NumericalFailure(GTIAsymError, ArithmeticError):
    pass


# Domain errors
class BranchCut(DomainError):
    pass


class Singular(DomainError):
    pass


class NotCertified(DomainError):
    pass


class TurningPoint(DomainError):
    pass


class NonpositiveRHS(DomainError):
    pass


class TrigZero(DomainError):
    pass


class DegenerateDenominator(DomainError):
    pass


class DerivativeNearZero(DomainError):
    pass


class NoSignChange(DomainError):
    pass


# Numerical failures
class NonIntegrableForm(NumericalFailure):
    pass


class QuadratureFailure(NumericalFailure):
    pass


class ToleranceNotMet(NumericalFailure):
    pass


class CancellationOverflow(NumericalFailure):
    pass


class DivergenceGate(NumericalFailure):
    pass


class BracketFailure(NumericalFailure):
    pass


class MaxIterations(NumericalFailure):
    pass


class MultipleDegenerates(NumericalFailure):
    pass


class CancellationWarning(UserWarning):
    """Issued when a subtraction loses more than six digits."""
