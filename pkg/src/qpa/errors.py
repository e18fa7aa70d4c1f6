"""Exception hierarchy shared by all qpa modules."""


class QpaError(Exception):
    """Base class for every error raised by qpa."""


class NotHermitian(QpaError, ValueError):
    pass


class NoConvergence(QpaError, ArithmeticError):
    pass


class NotADensityOperator(QpaError, ValueError):
    pass


class DimensionMismatch(QpaError, ValueError):
    pass


class RangeMismatch(QpaError, ValueError):
    pass


class LengthMismatch(QpaError, ValueError):
    pass


class ZeroProbabilityEvent(QpaError, ValueError):
    pass


class InvalidAlpha(QpaError, ValueError):
    pass


class InvalidEpsilon(QpaError, ValueError):
    pass


class CapExceeded(QpaError):
    """A configured size cap (dimension, seeds, spectrum terms) was exceeded."""


class DimensionOverflow(CapExceeded):
    pass


class TooLarge(CapExceeded):
    pass


class SeedSpaceTooLarge(CapExceeded):
    pass


class ParseError(QpaError):
    """Malformed scenario file. ``lineno`` is set when the parser knows it."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = "line %d: %s" % (lineno, message)
        super().__init__(message)
        self.lineno = lineno


class ValidationError(QpaError, ValueError):
    """Scenario content breaks an invariant. ``field`` names the culprit."""

    def __init__(self, field, message):
        super().__init__("%s: %s" % (field, message))
        self.field = field
