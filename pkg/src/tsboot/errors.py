"""Exception and warning types shared across the package."""
from __future__ import annotations


class TsbootError(Exception):
    """Base class for all errors raised by this package."""


class EmptySeriesError(TsbootError):
    """The input series has no rows."""


class NonFiniteError(TsbootError):
    """The input series contains a NaN or infinite value."""

    def __init__(self, row: int, col: int):
        self.row = row
        self.col = col
        super().__init__(f"non-finite value at row {row}, column {col}")


class NonUniformLengthsError(TsbootError):
    """A layout regime that requires equal block lengths received varying ones."""


class BlockTooLongError(TsbootError):
    """A requested block length exceeds what the series can supply."""


class MalformedConfigError(TsbootError):
    """A resampler spec or config document is invalid."""


class InsufficientDataError(TsbootError):
    """The series is too short for the requested model fit."""


class SingularDesignError(TsbootError):
    """The regression design matrix is rank deficient."""


class DegenerateReplicateError(TsbootError):
    """Repeated redraws produced only replicates the adjustment cannot fix."""


class EmptyStateError(TsbootError):
    """A sampled chain state has no stored values to emit."""


class TooManyFailedFitsError(TsbootError):
    """More than the tolerated share of per-replicate model fits failed."""


class NonStationaryFitWarning(UserWarning):
    """A fitted AR polynomial has a root on or inside the unit circle."""
