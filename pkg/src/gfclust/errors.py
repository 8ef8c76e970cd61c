"""Shared exception and warning types."""


class ConfigError(ValueError):
    """A configuration value violates its documented range or shape."""


class DivergenceError(RuntimeError):
    """Training produced a non-finite quantity.

    ``last_epoch`` is the last epoch whose loss was still finite (-1 if the
    very first evaluation already diverged).
    """

    def __init__(self, message: str, last_epoch: int = -1):
        super().__init__(message)
        self.last_epoch = last_epoch


class DataRepairWarning(UserWarning):
    """Raised when ingestion silently repairs a graph (symmetrization, diagonal)."""


class NumericsWarning(UserWarning):
    """Raised when a numerical guard kicked in (clamped log, dropped column, ...)."""
