"""Exception hierarchy.

Every numerical failure derives from NumericalError so the CLI can map it to
exit status 3; bad inputs derive from ConfigError (exit status 2).
"""


class SteklovError(Exception):
    pass


class ConfigError(SteklovError, ValueError):
    pass


class NumericalError(SteklovError, ArithmeticError):
    pass


# geometry
class NonPositiveRadius(ConfigError):
    pass


class NonStarShaped(ConfigError):
    pass


class UnsupportedDimension(ConfigError):
    pass


class LengthMismatch(ConfigError):
    pass


# spectrum
class UnsupportedKind(ConfigError):
    pass


class IllConditioned(NumericalError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotConverged(NumericalError):
    pass


# heat trace
class NonPositiveTime(ConfigError):
    pass


class MissingVolumeMetadata(ConfigError):
    pass


class TailTooLarge(NumericalError):
    pass


# invariants
class OrderNotValidForDimension(ConfigError):
    pass


class PatternDimensionMismatch(ConfigError):
    pass


class QuadratureNotConverged(NumericalError):
    pass


class DTermUnavailable(ConfigError):
    pass


# subordination
class NonPositiveArgument(ConfigError):
    pass


class NotSPD(ConfigError):
    pass


# inequalities
class UnsupportedBasis(ConfigError):
    pass


class MissingEpsilon(ConfigError):
    pass


class BandLimitTooLow(NumericalError):
    pass


# hearing
class IllConditionedFit(NumericalError):
    pass


class WindowTooNarrow(ConfigError):
    pass


class NotRecoverable(SteklovError):
    pass
