"""Exception hierarchy shared by all mixfractal modules."""


class MixfractalError(Exception):
    """Base class; ``code`` is the short tag used in CLI diagnostics."""

    code = "error"


class DomainError(MixfractalError, ValueError):
    code = "domain"


class SynthesisError(MixfractalError):
    code = "synthesis"


class KindError(MixfractalError, TypeError):
    code = "kind"


class SizeError(MixfractalError, ValueError):
    code = "size"


class UnsupportedOrderError(MixfractalError, ValueError):
    code = "order"


class InsufficientDataError(MixfractalError, ValueError):
    code = "insufficient-data"


class NoCrossoverError(MixfractalError, ValueError):
    code = "no-crossover"


class OrderingError(MixfractalError, ValueError):
    code = "ordering"


class ParseError(MixfractalError, ValueError):
    code = "parse"

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class SpacingError(ParseError):
    code = "spacing"


class EmptyInputError(ParseError):
    code = "empty-input"


class ConfigError(MixfractalError, ValueError):
    code = "config"


class HurstRangeWarning(UserWarning):
    """An estimated Hurst exponent fell outside (0, 1)."""
