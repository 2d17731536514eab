"""Exception hierarchy shared by every module.

Each class carries the CLI exit code it maps to.
"""


class CrossoverError(Exception):
    exit_code = 1


class ConfigurationError(CrossoverError, ValueError):
    """Invalid parameters, missing branch data, or a malformed config file."""

    exit_code = 2


class AccuracyError(CrossoverError, ArithmeticError):
    """A quadrature or fit did not reach its tolerance within the budget."""

    exit_code = 3

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ConsistencyError(CrossoverError, ArithmeticError):
    """Two independent evaluation routes disagree."""

    exit_code = 4

    def __init__(self, message, values=()):
        super().__init__(message)
        self.values = tuple(values)


class TableRangeError(AccuracyError):
    """An interpolation table was queried outside its grid."""


class NumericError(AccuracyError):
    """A non-finite value appeared during accumulation."""
