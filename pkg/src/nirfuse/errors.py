"""Exception hierarchy shared by every nirfuse module."""


class NirFuseError(Exception):
    """Base class for all library errors."""


class ShapeError(NirFuseError, ValueError):
    """Operands do not have matching dimensions."""


class FormatError(NirFuseError, ValueError):
    """A raster file could not be decoded, or has an unsupported layout."""


class ConvergenceError(NirFuseError, RuntimeError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message, residual, history=()):
        super().__init__(f"{message} (relative residual {residual:.3e})")
        self.residual = residual
        self.history = list(history)


class ImageTooSmallError(NirFuseError, ValueError):
    pass


class UndefinedBaselineError(NirFuseError, ZeroDivisionError):
    """Relative change requested against a baseline with zero matches."""


class DatasetLayoutError(NirFuseError):
    pass


class ConfigError(NirFuseError, ValueError):
    pass
