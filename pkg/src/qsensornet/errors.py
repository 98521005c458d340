"""Exception types raised across the package."""


class SensorNetError(Exception):
    """Base class for every error raised by qsensornet."""


class NotHermitian(SensorNetError, ValueError):
    pass


class NotPsd(SensorNetError, ValueError):
    pass


class DimensionMismatch(SensorNetError, ValueError):
    pass


class BadPriors(SensorNetError, ValueError):
    pass


class UnmappedLabel(SensorNetError, KeyError):
    pass


class DegenerateTheta(SensorNetError, ValueError):
    """Raised when theta = 0 makes every hypothesis state coincide."""


class NotPositive(SensorNetError, ValueError):
    """Raised when a failure operator built from user constants is not PSD."""


class NoSignChange(SensorNetError, ValueError):
    pass
