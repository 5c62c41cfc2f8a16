"""Replicate statistics, percentile intervals, and bagging forecasts."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import models
from .errors import InsufficientDataError, SingularDesignError, TooManyFailedFitsError
from .resamplers import Resampler, _recurse
from .rng import replicate_rng
from .types import (
    BootstrapReplicate,
    ResamplerSpec,
    RunConfig,
    SeriesLike,
    as_series,
    validate_series,
)

FAILED_FIT_TOLERANCE = 0.2
_FORECAST_TAG = 0x666F726563617374


def quantile(values: Sequence[float], q: float) -> float:
    """Nearest-rank quantile: an order statistic, never an interpolation.

    q = 0 returns the smallest value; otherwise the ceil(q * m)-th smallest.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must be in [0, 1]")
    ordered = np.sort(np.asarray(values, dtype=float))
    m = len(ordered)
    if m == 0:
        raise ValueError("quantile of an empty sequence")
    if q == 0.0:
        return float(ordered[0])
    return float(ordered[math.ceil(q * m) - 1])


def percentile_interval(values: Sequence[float], coverage: float) -> Tuple[float, float]:
    """Equal-tailed interval from the nearest-rank quantiles of ``values``."""
    if not 0.0 < coverage < 1.0:
        raise ValueError("coverage must be in (0, 1)")
    tail = (1.0 - coverage) / 2.0
    return quantile(values, tail), quantile(values, 1.0 - tail)


@dataclass(frozen=True)
class ReplicateSummary:
    """Per-replicate statistic values with their cross-replicate aggregates.

    ``per_replicate`` has one row per replicate and one column per channel;
    ``quantiles`` maps each requested level to its per-channel values.
    """

    per_replicate: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    quantiles: Dict[float, np.ndarray]


def summarize(
    replicates: Iterable[BootstrapReplicate],
    statistic: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    quantile_levels: Sequence[float] = (0.05, 0.5, 0.95),
) -> ReplicateSummary:
    """Apply a per-channel statistic to each replicate and aggregate.

    The statistic receives one replicate's n x d values and must return a
    length-d vector; the default is the per-channel mean.
    """
    if statistic is None:
        statistic = lambda values: values.mean(axis=0)
    rows = [np.atleast_1d(np.asarray(statistic(rep.values), dtype=float)) for rep in replicates]
    if not rows:
        raise ValueError("summarize requires at least one replicate")
    per_replicate = np.vstack(rows)
    quantiles = {
        float(level): np.array([quantile(per_replicate[:, ch], level) for ch in range(per_replicate.shape[1])])
        for level in quantile_levels
    }
    return ReplicateSummary(
        per_replicate=per_replicate,
        mean=per_replicate.mean(axis=0),
        std=per_replicate.std(axis=0),
        quantiles=quantiles,
    )


@dataclass(frozen=True)
class ForecastIntervals:
    """Point forecasts and per-level bands, each of shape (horizon, d).

    ``bands`` maps a coverage level to its (lower, upper) pair. Bands at
    higher coverage contain bands at lower coverage step by step.
    """

    horizon: int
    point: np.ndarray
    bands: Dict[float, Tuple[np.ndarray, np.ndarray]]
    n_used: int
    n_failed: int


def _fit_forecaster(values: np.ndarray, order: Optional[int], max_order: Optional[int]):
    """Per-channel AR fits of one replicate, sharing a common order."""
    n, d = values.shape
    if order is None:
        p_max = max_order if max_order is not None else models.default_max_ar_order(n)
        votes = []
        for channel in range(d):
            try:
                votes.append(models.select_ar_order(values[:, channel], p_max))
            except SingularDesignError:
                votes.append(1)
        order = max(votes)
    return [
        models.fit_ar_with_fallback(values[:, channel], order, channel)
        for channel in range(d)
    ]


def _forecast_path(model: models.FittedArModel, history: np.ndarray, horizon: int, rng) -> np.ndarray:
    """One simulated h-step continuation of ``history`` under the fitted model.

    Innovations are resampled from the model's centered residuals, so the
    spread across replicate forecasts reflects the residual noise instead of
    collapsing toward the deterministic mean path.
    """
    centered = model.residuals - model.residuals.mean()
    if len(centered) == 0 or float(np.abs(centered).max()) == 0.0:
        innovations = np.zeros(horizon)
    else:
        innovations = centered[rng.integers(0, len(centered), size=horizon)]
    order = model.order
    lag_init = history[-order:] if order else np.empty(0)
    return _recurse(model.intercept, model.coefficients, lag_init, innovations)


def bagging_forecast(
    series: SeriesLike,
    spec: ResamplerSpec,
    horizon: int,
    config: RunConfig,
    coverage_levels: Sequence[float] = (0.8,),
    ar_order: Optional[int] = None,
    max_ar_order: Optional[int] = None,
) -> ForecastIntervals:
    """Fit one AR forecaster per bootstrap replicate and pool their forecasts.

    Each fitted model simulates an h-step path continuing the original
    series. The point forecast is the per-step median across models; bands
    are per-step percentile intervals. Replicates whose fit fails are
    dropped, erroring when more than FAILED_FIT_TOLERANCE of them fail.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    series = validate_series(as_series(series))
    resampler = Resampler(spec)
    forecasts: List[np.ndarray] = []
    n_failed = 0
    for replicate in resampler.bootstrap(series, config):
        try:
            channel_models = _fit_forecaster(replicate.values, ar_order, max_ar_order)
        except InsufficientDataError:
            n_failed += 1
            continue
        # Forecast draws come from a stream tagged apart from the one used
        # for replicate generation, but still pure in (seed, ordinal).
        rng = replicate_rng(config.seed ^ _FORECAST_TAG, replicate.ordinal)
        steps = np.column_stack(
            [
                _forecast_path(model, series.values[:, channel], horizon, rng)
                for channel, model in enumerate(channel_models)
            ]
        )
        forecasts.append(steps)
    total = len(forecasts) + n_failed
    if total == 0:
        raise ValueError("bagging requires at least one replicate")
    if n_failed > FAILED_FIT_TOLERANCE * total:
        raise TooManyFailedFitsError(
            f"{n_failed} of {total} per-replicate fits failed"
        )
    stacked = np.stack(forecasts)  # (B, horizon, d)
    horizon_range = range(horizon)
    d = stacked.shape[2]
    point = np.array(
        [[quantile(stacked[:, step, ch], 0.5) for ch in range(d)] for step in horizon_range]
    )
    bands: Dict[float, Tuple[np.ndarray, np.ndarray]] = {}
    for level in coverage_levels:
        lower = np.empty((horizon, d))
        upper = np.empty((horizon, d))
        for step in horizon_range:
            for ch in range(d):
                low, high = percentile_interval(stacked[:, step, ch], level)
                lower[step, ch] = low
                upper[step, ch] = high
        bands[float(level)] = (lower, upper)
    return ForecastIntervals(
        horizon=horizon,
        point=point,
        bands=bands,
        n_used=len(forecasts),
        n_failed=n_failed,
    )
