"""
Exceptions: rejected input and numerical failures.
Input errors subclass ValueError, numerical failures subclass ArithmeticError.
"""
from typing import Optional


class DephasingError(Exception):
    """Base class for all toolkit errors."""


class InvalidStateError(DephasingError, ValueError):
    """A density matrix or pure-state amplitude pair violates its invariants."""


class UnphysicalParameterError(DephasingError, ValueError):
    """A parameter lies outside its physical range (|γ| > 1, negative frequency, ...)."""


class UnsupportedParameterError(DephasingError, ValueError):
    """
    The requested backend has no formula for these parameters.
    The message names the backend that does.
    """


class NumericalError(DephasingError, ArithmeticError):
    """Base class for numerical failures (exit status 2 at the command line)."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach tolerance within its subdivision budget."""

    def __init__(self, message: str, error_estimate: float):
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


class IntegrationError(NumericalError):
    """The ODE integrator gave up before the end of the time grid."""

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} at t={time:.6g}")
        self.time = time


class IllConditionedError(NumericalError):
    """A ratio of decoherence factors has a (near) vanishing denominator."""

    def __init__(self, message: str, magnitude: Optional[float] = None):
        if magnitude is not None:
            message = f"{message} (|denominator| = {magnitude:.3e})"
        super().__init__(message)
        self.magnitude = magnitude


class ConfigurationError(DephasingError, ValueError):
    """A sweep configuration file cannot be read or has an unknown layout."""
