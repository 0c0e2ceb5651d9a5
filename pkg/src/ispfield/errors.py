"""Exception types raised across the package."""


class IspError(Exception):
    """Base class for all errors raised by ispfield."""


class PolarityViolation(IspError, ValueError):
    """An operand carries the infinity forbidden by the active polarity."""


class InvalidScalar(IspError, ValueError):
    """A scalar (or scalar-field weight) outside the open interval (0, +inf)."""


class DimensionMismatch(IspError, ValueError):
    pass


class PolarityMismatch(IspError, ValueError):
    pass


class BandOutOfBounds(IspError, IndexError):
    pass


class InvalidParams(IspError, ValueError):
    """Constraint or guidance parameters violate their invariants."""


class NonFiniteInput(IspError, ValueError):
    pass


class NonMonotonicTime(IspError, ValueError):
    pass


class ObjectMismatch(IspError, ValueError):
    pass


class DegenerateScale(IspError, ValueError):
    pass


class InfiniteTau(IspError, ValueError):
    pass


class OutOfRange(IspError, ValueError):
    """A column or steering angle outside the camera's image."""


class ThetaOutOfFov(OutOfRange):
    pass


class NonPositiveDt(IspError, ValueError):
    pass


class UnknownObject(IspError, KeyError):
    pass


class ConfigError(IspError, ValueError):
    """Scenario configuration could not be parsed; ``key`` names the culprit."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key
