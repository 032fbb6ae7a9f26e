"""Exception hierarchy shared by all modules.

Each class carries the process exit code the command-line front end uses
when the exception escapes a subcommand.
"""


class IsingQFIError(Exception):
    exit_code = 1


class ConfigError(IsingQFIError, ValueError):
    exit_code = 2


class DomainError(IsingQFIError, ValueError):
    """Invalid physical parameters or malformed operator input."""

    exit_code = 2


class FitError(DomainError):
    pass


class CapacityError(IsingQFIError):
    """Requested chain is too long for dense exact diagonalization."""

    exit_code = 4


class NumericalError(IsingQFIError, ArithmeticError):
    exit_code = 3


class DegeneracyError(NumericalError):
    pass


class AccuracyError(NumericalError):
    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class RegimeError(NumericalError):
    pass


class ScanRangeError(NumericalError):
    pass


class StepSizeError(NumericalError):
    pass


class GridTooNarrowError(NumericalError):
    pass


class DegenerateDistributionError(NumericalError):
    pass
