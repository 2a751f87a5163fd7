"""Exception types shared across the package."""


class TFQError(Exception):
    """Base class for package errors."""


class ConfigError(TFQError, ValueError):
    """Invalid parameters or a violated theorem hypothesis detected up front."""


class NumericalError(TFQError, ArithmeticError):
    """A numerical precondition failed (e.g. a system is not a frame)."""


class NotAFrameError(NumericalError):
    pass
