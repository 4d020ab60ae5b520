"""Exception and warning types shared across the package."""


class ApneaRadarError(Exception):
    """Base class for all errors raised by this package."""


class ZeroMagnitudeSample(ApneaRadarError):
    """An echo sample has zero magnitude, so its phase is undefined."""

    def __init__(self, index: int):
        super().__init__(f"echo sample {index} has zero magnitude; phase is undefined")
        self.index = index


class SeriesTooShort(ApneaRadarError):
    """A series is shorter than the window that must be applied to it."""


class TooFewSamples(ApneaRadarError):
    """Not enough samples to fit a mixture model."""


class NonBinaryInput(ApneaRadarError):
    """An operation expected a series with values in {0, 1}."""


class CoverageGap(ApneaRadarError):
    """A sample is covered by no analysis interval."""

    def __init__(self, index: int):
        super().__init__(f"sample {index} is covered by no interval")
        self.index = index


class LengthMismatch(ApneaRadarError):
    """Two series that must be compared sample-by-sample differ in length or rate."""


class InvalidSpec(ApneaRadarError):
    """A scenario specification fails validation."""


class ParseError(ApneaRadarError):
    """A file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NonUniformSampling(ApneaRadarError):
    """Timestamps in a series file are not uniformly spaced."""

    def __init__(self, index: int):
        super().__init__(f"non-uniform sampling at row {index}")
        self.index = index


class OverlapError(ApneaRadarError):
    """Two annotation events overlap in time."""


class UnknownType(ApneaRadarError):
    """An annotation event carries an unrecognised type code."""


class ConfigError(ApneaRadarError):
    """A configuration file is malformed or carries unknown keys."""


class IntervalLongerThanRecord(UserWarning):
    """The requested interval length exceeds the record; a single full-record
    interval is used instead."""
