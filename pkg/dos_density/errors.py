"""Exception hierarchy shared by every module of the toolkit."""
from typing import Optional


class DensityToolkitError(Exception):
    """Base exception for all toolkit errors"""
    pass


class InvalidParameterError(DensityToolkitError, ValueError):
    """Raised when a model parameter (dimension, density, radius, channel) is invalid"""
    pass


class DomainError(DensityToolkitError, ValueError):
    """Raised when a density, CDF or estimator is evaluated outside its domain"""
    pass


class RankViolationError(DomainError):
    """
    Raised when locally collected power samples are not strictly decreasing.

    Attributes:
        line (int, optional): 1-based line of the offending value when the
            samples were read from a file.
    """
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message)
        self.line = line


class MissingSamplesError(DensityToolkitError, ValueError):
    """Raised when an estimator or metric receives no data"""
    pass


class InsufficientSamplesError(DensityToolkitError, ValueError):
    """Raised when a statistical test gets fewer samples than it supports"""
    pass


class ToleranceNotMetError(DensityToolkitError, ArithmeticError):
    """
    Raised when adaptive quadrature cannot reach the requested tolerance.

    Attributes:
        best_estimate (float): Integral value reached before giving up.
        error_estimate (float): Absolute error estimate of best_estimate.
    """
    def __init__(self, message: str, best_estimate: float, error_estimate: float):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class BracketError(DensityToolkitError, ArithmeticError):
    """Raised when a scalar maximizer lands on the boundary of its bracket"""
    pass


class ConfigError(DensityToolkitError, ValueError):
    """Raised for invalid experiment configurations or sweep-mode mismatches"""
    pass


class SampleParseError(DensityToolkitError, ValueError):
    """Raised when a sample file line is not a decimal number"""
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message)
        self.line = line
