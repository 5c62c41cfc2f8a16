"""Domain types: series container, method catalog, resampler and run configs."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from .errors import EmptySeriesError, MalformedConfigError, NonFiniteError


class Method(str, Enum):
    MOVING_BLOCK = "MovingBlock"
    CIRCULAR_BLOCK = "CircularBlock"
    STATIONARY_BLOCK = "StationaryBlock"
    NON_OVERLAPPING_BLOCK = "NonOverlappingBlock"
    TAPERED_BLOCK = "TaperedBlock"
    WHOLE_RESIDUAL = "WholeResidual"
    BLOCK_RESIDUAL = "BlockResidual"
    WHOLE_STATISTIC_PRESERVING = "WholeStatisticPreserving"
    BLOCK_STATISTIC_PRESERVING = "BlockStatisticPreserving"
    WHOLE_DISTRIBUTION = "WholeDistribution"
    BLOCK_DISTRIBUTION = "BlockDistribution"
    WHOLE_MARKOV = "WholeMarkov"
    BLOCK_MARKOV = "BlockMarkov"
    WHOLE_SIEVE = "WholeSieve"
    BLOCK_SIEVE = "BlockSieve"


class Window(str, Enum):
    BARTLETT = "Bartlett"
    HAMMING = "Hamming"
    HANNING = "Hanning"
    BLACKMAN = "Blackman"
    TUKEY = "Tukey"


class Distribution(str, Enum):
    GAUSSIAN = "Gaussian"
    EMPIRICAL = "Empirical"


class Statistic(str, Enum):
    MEAN = "Mean"
    STD = "Std"
    MEAN_AND_STD = "MeanAndStd"


# Methods built on block index machinery alone; valid as inner resamplers.
PURE_BLOCK_METHODS = frozenset(
    {
        Method.MOVING_BLOCK,
        Method.CIRCULAR_BLOCK,
        Method.STATIONARY_BLOCK,
        Method.NON_OVERLAPPING_BLOCK,
        Method.TAPERED_BLOCK,
    }
)

# Model-based methods whose block variant composes with an inner block resampler.
BLOCK_COMPOSED_METHODS = frozenset(
    {
        Method.BLOCK_RESIDUAL,
        Method.BLOCK_STATISTIC_PRESERVING,
        Method.BLOCK_DISTRIBUTION,
        Method.BLOCK_MARKOV,
        Method.BLOCK_SIEVE,
    }
)

AR_METHODS = frozenset(
    {Method.WHOLE_RESIDUAL, Method.BLOCK_RESIDUAL, Method.WHOLE_SIEVE, Method.BLOCK_SIEVE}
)

DISTRIBUTION_METHODS = frozenset({Method.WHOLE_DISTRIBUTION, Method.BLOCK_DISTRIBUTION})
STATISTIC_METHODS = frozenset(
    {Method.WHOLE_STATISTIC_PRESERVING, Method.BLOCK_STATISTIC_PRESERVING}
)
MARKOV_METHODS = frozenset({Method.WHOLE_MARKOV, Method.BLOCK_MARKOV})

DEFAULT_BLOCK_LENGTH = 10
DEFAULT_TUKEY_ALPHA = 0.5

# Fields each method actually consumes; anything else passed explicitly is rejected.
_RELEVANT_FIELDS = {}
for _m in Method:
    _fields = set()
    if _m in PURE_BLOCK_METHODS or _m in BLOCK_COMPOSED_METHODS:
        _fields.add("block_length")
    if _m is Method.STATIONARY_BLOCK:
        _fields.add("geometric_p")
    if _m is Method.TAPERED_BLOCK:
        _fields.update({"window", "tukey_alpha"})
    if _m in AR_METHODS:
        _fields.update({"ar_order", "max_ar_order"})
    if _m in DISTRIBUTION_METHODS:
        _fields.add("distribution")
    if _m in STATISTIC_METHODS:
        _fields.add("statistic")
    if _m in MARKOV_METHODS:
        _fields.add("n_states")
    if _m in BLOCK_COMPOSED_METHODS:
        _fields.add("inner")
    _RELEVANT_FIELDS[_m] = frozenset(_fields)


def _coerce_enum(kind, value, label: str):
    if isinstance(value, kind):
        return value
    if isinstance(value, str):
        for member in kind:
            if member.value == value:
                return member
    choices = ", ".join(member.value for member in kind)
    raise MalformedConfigError(f"{label} must be one of: {choices} (got {value!r})")


def _check_positive_int(value, label: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedConfigError(f"{label} must be a positive integer (got {value!r})")
    if value < 1:
        raise MalformedConfigError(f"{label} must be >= 1 (got {value})")
    return value


@dataclass(frozen=True)
class ResamplerSpec:
    """Declarative description of one bootstrap method and its parameters.

    Fields not consumed by the chosen method must be left unset; they are
    rejected rather than silently ignored. Unset tunables are normalized to
    their documented defaults, so two specs describing the same resampler
    compare equal. ``ar_order``, ``max_ar_order``, and ``n_states`` use None
    to mean "choose automatically from the data".
    """

    method: Method
    block_length: Optional[int] = None
    geometric_p: Optional[float] = None
    window: Optional[Window] = None
    tukey_alpha: Optional[float] = None
    ar_order: Optional[int] = None
    max_ar_order: Optional[int] = None
    distribution: Optional[Distribution] = None
    statistic: Optional[Statistic] = None
    n_states: Optional[int] = None
    inner: Optional["ResamplerSpec"] = None

    def __post_init__(self):
        method = _coerce_enum(Method, self.method, "method")
        object.__setattr__(self, "method", method)
        relevant = _RELEVANT_FIELDS[method]
        for name in (
            "block_length",
            "geometric_p",
            "window",
            "tukey_alpha",
            "ar_order",
            "max_ar_order",
            "distribution",
            "statistic",
            "n_states",
            "inner",
        ):
            if getattr(self, name) is not None and name not in relevant:
                raise MalformedConfigError(
                    f"{name} is not used by method {method.value}"
                )
        self._normalize(relevant)

    def _normalize(self, relevant) -> None:
        method = self.method
        if "block_length" in relevant:
            length = self.block_length
            length = DEFAULT_BLOCK_LENGTH if length is None else _check_positive_int(length, "block_length")
            object.__setattr__(self, "block_length", length)
        if "geometric_p" in relevant:
            p = self.geometric_p
            if p is None:
                p = 1.0 / self.block_length
            if isinstance(p, bool) or not isinstance(p, (int, float)):
                raise MalformedConfigError(f"geometric_p must be a number (got {p!r})")
            p = float(p)
            if not 0.0 < p <= 1.0:
                raise MalformedConfigError(f"geometric_p must be in (0, 1] (got {p})")
            object.__setattr__(self, "geometric_p", p)
        if "window" in relevant:
            window = Window.BARTLETT if self.window is None else _coerce_enum(Window, self.window, "window")
            object.__setattr__(self, "window", window)
            alpha = self.tukey_alpha
            if window is Window.TUKEY:
                alpha = DEFAULT_TUKEY_ALPHA if alpha is None else float(alpha)
                if not 0.0 <= alpha <= 1.0:
                    raise MalformedConfigError(f"tukey_alpha must be in [0, 1] (got {alpha})")
            elif alpha is not None:
                raise MalformedConfigError("tukey_alpha is only used with the Tukey window")
            object.__setattr__(self, "tukey_alpha", alpha)
        if "ar_order" in relevant:
            if self.ar_order is not None:
                _check_positive_int(self.ar_order, "ar_order")
            if self.max_ar_order is not None:
                _check_positive_int(self.max_ar_order, "max_ar_order")
        if "distribution" in relevant:
            dist = Distribution.GAUSSIAN if self.distribution is None else _coerce_enum(
                Distribution, self.distribution, "distribution"
            )
            object.__setattr__(self, "distribution", dist)
        if "statistic" in relevant:
            stat = Statistic.MEAN_AND_STD if self.statistic is None else _coerce_enum(
                Statistic, self.statistic, "statistic"
            )
            object.__setattr__(self, "statistic", stat)
        if "n_states" in relevant and self.n_states is not None:
            _check_positive_int(self.n_states, "n_states")
        if "inner" in relevant:
            inner = self.inner
            if inner is None:
                inner = ResamplerSpec(Method.MOVING_BLOCK, block_length=self.block_length)
            elif not isinstance(inner, ResamplerSpec):
                raise MalformedConfigError("inner must be a ResamplerSpec")
            elif inner.method not in PURE_BLOCK_METHODS:
                raise MalformedConfigError(
                    f"inner method must be a block method, got {inner.method.value}"
                )
            object.__setattr__(self, "inner", inner)


@dataclass(frozen=True)
class RunConfig:
    """How many replicates to generate, from which seed, and with what extras."""

    n_bootstraps: int
    seed: int = 0
    return_indices: bool = False

    def __post_init__(self):
        if isinstance(self.n_bootstraps, bool) or not isinstance(self.n_bootstraps, int):
            raise MalformedConfigError("n_bootstraps must be an integer")
        if self.n_bootstraps < 0:
            raise MalformedConfigError("n_bootstraps must be >= 0")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise MalformedConfigError("seed must be an integer")
        if not 0 <= self.seed < 2**64:
            raise MalformedConfigError("seed must fit in an unsigned 64-bit integer")


class TimeSeries:
    """An n x d matrix of observations; rows are time steps, columns channels.

    Row order is temporal order and is never reordered in place. A 1-D input
    is treated as a single channel.
    """

    __slots__ = ("values", "channel_names")

    def __init__(self, values, channel_names: Optional[Sequence[str]] = None):
        arr = np.array(values, dtype=float, copy=True, order="C")
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise ValueError(f"series must be 1-D or 2-D, got {arr.ndim} dimensions")
        arr.setflags(write=False)
        self.values = arr
        if channel_names is not None:
            names = tuple(str(name) for name in channel_names)
            if len(names) != arr.shape[1]:
                raise ValueError("channel_names length must match the number of columns")
            self.channel_names = names
        else:
            self.channel_names = None

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def __repr__(self) -> str:
        return f"TimeSeries(n={self.n}, d={self.d})"


SeriesLike = Union[TimeSeries, np.ndarray, Sequence]


def as_series(data: SeriesLike) -> TimeSeries:
    """Wrap array-like input into a TimeSeries, passing existing ones through."""
    if isinstance(data, TimeSeries):
        return data
    return TimeSeries(data)


def validate_series(series: SeriesLike) -> TimeSeries:
    """Coerce to a TimeSeries and check every input invariant."""
    series = as_series(series)
    if series.n == 0:
        raise EmptySeriesError("series has no rows")
    finite = np.isfinite(series.values)
    if not finite.all():
        row, col = np.argwhere(~finite)[0]
        raise NonFiniteError(int(row), int(col))
    return series


@dataclass(frozen=True)
class BootstrapReplicate:
    """One generated sample: its ordinal, values, and optional source indices.

    Indices give the original row each output row was taken from; -1 marks
    rows with no single source, such as synthetic model draws.
    """

    ordinal: int
    values: np.ndarray
    indices: Optional[np.ndarray] = None
