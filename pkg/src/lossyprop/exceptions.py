"""Exception hierarchy shared by every lossyprop module."""


class LossyPropError(Exception):
    """Base class for all library errors."""


class ConfigError(LossyPropError, ValueError):
    """Invalid input parameters. Maps to CLI exit code 2."""


class NumericalError(LossyPropError, ArithmeticError):
    """A numerical routine failed. Maps to CLI exit code 3."""


class AllZeroAmplitudes(ConfigError):
    pass


class DimensionMismatch(ConfigError):
    pass


class CutoffExceeded(ConfigError):
    pass


class OutOfDomain(ConfigError):
    pass


class InvalidLossFraction(ConfigError):
    pass


class IndexOutOfRange(ConfigError):
    pass


class InsufficientData(ConfigError):
    pass


class EigensolverFailure(NumericalError):
    """Hermitian eigensolver did not converge.

    ``context`` carries whatever the caller knows about where it happened
    (state index, distance, matrix dimension).
    """

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.context = context

    def __str__(self):
        base = super().__str__()
        if not self.context:
            return base
        extra = ", ".join(f"{k}={v!r}" for k, v in self.context.items())
        return f"{base} ({extra})"
