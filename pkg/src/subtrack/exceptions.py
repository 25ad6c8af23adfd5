"""Exception types raised by the public API."""


class SubtrackError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(SubtrackError, ValueError):
    """Operands have incompatible shapes."""


class DegenerateSubspace(SubtrackError, ValueError):
    """A matrix that should span a d-dimensional subspace is rank deficient."""


class NotSymmetric(SubtrackError, ValueError):
    """A matrix expected to be symmetric is not."""


class SubspacesOrthogonal(SubtrackError, ValueError):
    """The largest principal angle is 90 degrees; its tangent is undefined."""


class EmptyAccumulator(SubtrackError, ValueError):
    """The covariance accumulator has not seen any sample yet."""


class NegativeThreshold(SubtrackError, ValueError):
    """Thresholding levels must be nonnegative."""


class RankDeficientWarmup(SubtrackError, ValueError):
    """Warm-up observations do not span enough dimensions to initialize."""


class EmptySelection(SubtrackError, ValueError):
    """Diagonal selection found fewer coordinates than components requested."""


class BadLength(SubtrackError, ValueError):
    """Signal length is not compatible with the requested wavelet depth."""


class ConfigError(SubtrackError, ValueError):
    """Experiment configuration failed validation."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class MalformedCSV(SubtrackError, ValueError):
    """An ingested CSV has an inconsistent row or a non-finite entry."""

    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")
