"""
Custom exceptions for the KMB09 simulation toolkit.
"""


class KMBQKDException(Exception):
    """Base exception for the toolkit."""
    pass


class InvalidAngleError(KMBQKDException):
    """Exception raised when an angle is not a finite real number."""
    pass


class ContractViolationError(KMBQKDException):
    """Exception raised when a caller breaks an operation's precondition."""
    pass


class UndefinedRateError(KMBQKDException):
    """Exception raised when a rate has a vanishing denominator."""
    pass


class DegenerateFitError(KMBQKDException):
    """Exception raised when the ITER-vs-QBER fit has no QBER spread."""
    pass


class NoDataError(KMBQKDException):
    """Exception raised when a session carries no rate estimates."""
    pass


class SweepFileError(KMBQKDException):
    """Exception raised when a sweep file cannot be parsed."""
    pass


class ConfigurationError(KMBQKDException):
    """Exception raised when configuration is invalid."""
    pass
