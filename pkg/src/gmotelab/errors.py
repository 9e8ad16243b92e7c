"""Exception types raised across the package."""


class GmoteLabError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(GmoteLabError, ValueError):
    pass


class InvalidArgument(GmoteLabError, ValueError):
    pass


class NotPositiveDefinite(GmoteLabError, ArithmeticError):
    pass


class EmptyData(GmoteLabError, ValueError):
    pass


class TooManyComponents(GmoteLabError, ValueError):
    pass


class InsufficientSampleSize(GmoteLabError, ValueError):
    pass


class TooFewInstances(GmoteLabError, ValueError):
    pass


class AcceptanceStarvation(GmoteLabError, RuntimeError):
    """Rejection sampling drew too many candidates without filling the quota."""


class TooFewMinority(GmoteLabError, ValueError):
    pass


class SingleClass(GmoteLabError, ValueError):
    pass


class LengthMismatch(GmoteLabError, ValueError):
    pass


class EmptyCounts(GmoteLabError, ValueError):
    pass


class ClassTooSmall(GmoteLabError, ValueError):
    pass


class MalformedHeader(GmoteLabError, ValueError):
    pass


class NonNumericFeature(GmoteLabError, ValueError):
    pass


class MissingColumn(GmoteLabError, KeyError):
    pass


class ConfigError(GmoteLabError, ValueError):
    pass
