"""Exception hierarchy shared by all modules."""


class ConfigModelError(Exception):
    """Base class for every error raised by :mod:`configmc`."""


class ParseError(ConfigModelError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class SpaceViolationError(ConfigModelError):
    """The graph contains a self-loop or multi-edge its space forbids."""


class CannotSwapError(ConfigModelError):
    """Fewer than two edges: no double-edge swap can be proposed."""


class DensityUndefinedError(ConfigModelError):
    pass


class AssortativityUndefinedError(ConfigModelError):
    """Regular degree sequence: S1*S3 == S2**2 and r has no denominator."""


class DegenerateSeriesError(ConfigModelError):
    """A statistic was requested on a series with zero variance."""


class EstimationFailedError(ConfigModelError):
    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class NonconvergenceTimeoutError(ConfigModelError):
    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class EnumerationRefusedError(ConfigModelError):
    pass
