"""Exception types shared across the package."""


class StructureError(ValueError):
    """Shapes, grids or masks of the operands do not match."""


class UsageError(ValueError):
    """An operation was called with arguments outside its contract."""


class ConfigError(ValueError):
    """Invalid or unknown configuration input."""


class GeometryError(ValueError):
    """A mask or control region could not be constructed as requested."""


class DomainError(ValueError):
    """State outside the admissible domain of an operator."""


class ConvergenceError(RuntimeError):
    """An iterative solver did not reach its tolerance.

    Carries the last residual, the iteration count and, when available,
    a per-iteration residual log for post-mortem inspection.
    """

    def __init__(self, message, residual=None, iterations=None, log=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
        self.log = log if log is not None else []
