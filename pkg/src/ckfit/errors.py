"""Exception hierarchy shared by the library and the CLI."""


class CkfitError(Exception):
    """Base class for all errors raised by ckfit."""


class UsageError(CkfitError, ValueError):
    """Invalid arguments or configuration."""


class DomainError(UsageError):
    """Evaluation point lies outside the knot range."""


class ParseError(UsageError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericalError(CkfitError, ArithmeticError):
    """Base for failures of the numerics themselves."""


class ConditioningError(NumericalError):
    """A linear system is singular or under-determined."""


class DivergenceError(NumericalError):
    def __init__(self, epoch, value):
        self.epoch = epoch
        self.value = value
        super().__init__(f"loss became non-finite ({value}) at epoch {epoch}")
