"""Exception types raised by the simulator."""


class ConfigurationError(ValueError):
    """Invalid dimensions, parameters or configuration values."""


class ModelError(ValueError):
    """Array shapes that do not fit the signal model."""


class IllConditionedModelError(ModelError):
    """A receive filter was requested for a system that cannot be solved."""


class InvalidPairError(ValueError):
    """A relay pair with identical members (or out of range)."""


class BufferFull(RuntimeError):
    """Push on a buffer whose occupancy has reached its capacity."""


class BufferEmpty(RuntimeError):
    """Pop on an empty buffer."""


class UndefinedDelayError(ZeroDivisionError):
    """The analytical delay expression has a zero denominator."""


class InsufficientDataError(RuntimeError):
    """A statistic was requested from a trace without the events it needs."""
