"""Time-series bootstrapping: block, residual, distribution, Markov, and sieve methods."""

from .compliance import ComplianceCheck, ComplianceReport, check_resampler
from .config import (
    load_spec,
    parse_spec_toml,
    spec_from_dict,
    spec_roundtrip,
    spec_to_dict,
    spec_to_toml,
)
from .errors import (
    BlockTooLongError,
    DegenerateReplicateError,
    EmptySeriesError,
    EmptyStateError,
    InsufficientDataError,
    MalformedConfigError,
    NonFiniteError,
    NonStationaryFitWarning,
    NonUniformLengthsError,
    SingularDesignError,
    TooManyFailedFitsError,
    TsbootError,
)
from .resamplers import Resampler, bootstrap
from .rng import replicate_key, replicate_rng
from .stats import (
    ForecastIntervals,
    ReplicateSummary,
    bagging_forecast,
    percentile_interval,
    quantile,
    summarize,
)
from .types import (
    BootstrapReplicate,
    Distribution,
    Method,
    ResamplerSpec,
    RunConfig,
    Statistic,
    TimeSeries,
    Window,
    as_series,
    validate_series,
)

__version__ = "0.1.0"

__all__ = [
    "BlockTooLongError",
    "BootstrapReplicate",
    "ComplianceCheck",
    "ComplianceReport",
    "DegenerateReplicateError",
    "Distribution",
    "EmptySeriesError",
    "EmptyStateError",
    "ForecastIntervals",
    "InsufficientDataError",
    "MalformedConfigError",
    "Method",
    "NonFiniteError",
    "NonStationaryFitWarning",
    "NonUniformLengthsError",
    "ReplicateSummary",
    "Resampler",
    "ResamplerSpec",
    "RunConfig",
    "SingularDesignError",
    "Statistic",
    "TimeSeries",
    "TooManyFailedFitsError",
    "TsbootError",
    "Window",
    "as_series",
    "bagging_forecast",
    "bootstrap",
    "check_resampler",
    "load_spec",
    "parse_spec_toml",
    "percentile_interval",
    "quantile",
    "replicate_key",
    "replicate_rng",
    "spec_from_dict",
    "spec_roundtrip",
    "spec_to_dict",
    "spec_to_toml",
    "summarize",
    "validate_series",
]
