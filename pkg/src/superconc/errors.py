"""Exception types raised across the package."""


class SuperconcError(Exception):
    """Base class for all package errors."""


class NotPSD(SuperconcError):
    pass


class DegenerateField(SuperconcError):
    """Two coordinates coincide almost surely, so the argmax is ill-defined."""


class LengthMismatch(SuperconcError, ValueError):
    pass


class EmptyVector(SuperconcError, ValueError):
    pass


class BackendInfeasible(SuperconcError):
    pass


class TooLarge(SuperconcError, ValueError):
    pass


class TooSmall(SuperconcError, ValueError):
    pass


class DomainError(SuperconcError, ValueError):
    pass


class InvalidRange(SuperconcError, ValueError):
    pass


class DivideByZero(SuperconcError, ZeroDivisionError):
    pass


class NonpositiveX(SuperconcError, ValueError):
    pass


class NoConvergence(SuperconcError):
    pass


class KernelOrderViolated(SuperconcError):
    pass


class ModelSpecError(SuperconcError, ValueError):
    """A model specification string could not be parsed."""

    def __init__(self, token, reason):
        self.token = token
        self.reason = reason
        super().__init__(f"{reason}: {token!r}")


class ParseError(SuperconcError, ValueError):
    """Experiment config error with the offending line and key."""

    def __init__(self, line, key, reason):
        self.line = line
        self.key = key
        self.reason = reason
        where = f"line {line}" if line is not None else "config"
        super().__init__(f"{where}: {key}: {reason}")
