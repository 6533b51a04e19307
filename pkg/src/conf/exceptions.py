class LQMException(Exception):
    """Base class for every failure raised by the package."""


class ConfigFileNotFoundException(LQMException, FileNotFoundError):
    """Required settings or run-config file can't be found."""


class InvalidConfigException(LQMException, ValueError):
    """Run config failed schema validation."""


class EmptySampleException(LQMException, ValueError):
    """A sample or dataset that must be non-empty is empty."""


class QuantileOutOfRangeException(LQMException, ValueError):
    """Requested probability lies outside [0, 1]."""


class NonFiniteValueException(LQMException, ValueError):
    """NaN or Inf reached a place that only accepts finite reals."""


class ShapeMismatchException(LQMException, ValueError):
    """Matrix shapes or feature widths are incompatible."""


class BudgetException(LQMException, ValueError):
    """Per-class budget is invalid for the data at hand."""


class ConvergenceException(LQMException, RuntimeError):
    """An iterative procedure did not reach its tolerance."""

    def __init__(self, message: str, last_eps: float):
        super().__init__(message)
        self.last_eps = last_eps


class DatasetFormatException(LQMException, ValueError):
    """Dataset, graph or synthetic file violates its format."""


class DatasetFileNotFoundException(LQMException, FileNotFoundError):
    """Dataset file can't be found."""


class UndefinedMetricException(LQMException, ValueError):
    """Metric is not defined for the requested arguments."""


class UnsortedPointsException(LQMException, ValueError):
    """Support points must be given in ascending order."""
