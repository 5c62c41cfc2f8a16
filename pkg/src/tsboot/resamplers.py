"""The fifteen bootstrap methods behind one replicate-generation entry point."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import numpy as np

from . import blocks, models
from .blocks import FixedLength, GeometricLength, Regime
from .errors import (
    BlockTooLongError,
    DegenerateReplicateError,
    InsufficientDataError,
    MalformedConfigError,
    NonStationaryFitWarning,
    SingularDesignError,
)
from .rng import replicate_rng
from .types import (
    BLOCK_COMPOSED_METHODS,
    PURE_BLOCK_METHODS,
    BootstrapReplicate,
    Distribution,
    Method,
    ResamplerSpec,
    RunConfig,
    SeriesLike,
    Statistic,
    TimeSeries,
    as_series,
    validate_series,
)

SIEVE_BURN_IN = 100
MAX_DEGENERATE_REDRAWS = 10

_REGIME_FOR_METHOD = {
    Method.MOVING_BLOCK: Regime.MOVING,
    Method.TAPERED_BLOCK: Regime.MOVING,
    Method.CIRCULAR_BLOCK: Regime.CIRCULAR,
    Method.STATIONARY_BLOCK: Regime.STATIONARY,
    Method.NON_OVERLAPPING_BLOCK: Regime.NON_OVERLAPPING,
}


@dataclass(frozen=True)
class _ArFit:
    order: int
    channel_models: Tuple[models.FittedArModel, ...]
    residuals: np.ndarray  # centered, shape (n - order, d)


@dataclass(frozen=True)
class _Moments:
    means: np.ndarray
    stds: np.ndarray


@dataclass(frozen=True)
class _GaussianFit:
    params: Tuple[Tuple[float, float], ...]  # per-channel (mu, sigma)


@dataclass(frozen=True)
class _MarkovFit:
    channel_models: Tuple[models.MarkovChainModel, ...]


@dataclass(frozen=True)
class _BlockChainFit:
    chain: models.MarkovChainModel
    block_length: int
    n_blocks: int


def _block_index_draw(spec: ResamplerSpec, n: int, rng) -> Tuple[np.ndarray, List[int]]:
    """Sample lengths and a layout, returning materialized indices and lengths."""
    if spec.method is Method.STATIONARY_BLOCK:
        sampler = GeometricLength(spec.geometric_p)
    else:
        sampler = FixedLength(spec.block_length)
    lengths = blocks.sample_block_lengths(sampler, n, rng)
    layout = blocks.generate_layout(_REGIME_FOR_METHOD[spec.method], n, lengths, rng)
    return blocks.materialize_indices(layout, n), lengths


def _block_replicate(values: np.ndarray, spec: ResamplerSpec, rng) -> Tuple[np.ndarray, np.ndarray, List[int]]:
    """One block-bootstrap draw over the rows of ``values``.

    Returns the resampled rows, their source indices, and the truncated run
    lengths. Tapering multiplies per-block window weights into deviations
    from the full-series channel means, so a constant series is unchanged.
    """
    n = len(values)
    indices, lengths = _block_index_draw(spec, n, rng)
    out = values[indices]
    if spec.method is Method.TAPERED_BLOCK:
        weights = np.concatenate(
            [blocks.window_weights(spec.window, length, spec.tukey_alpha or 0.5) for length in lengths]
        )[:n]
        means = values.mean(axis=0)
        out = means + weights[:, None] * (out - means)
    return out, indices, blocks.truncated_run_lengths(lengths, n)


class Resampler:
    """A configured bootstrap method; generates replicates from any series.

    Model fits are a pure function of (series, spec) and are computed once
    per series; each replicate is then a pure function of (seed, ordinal),
    so generation can run sequentially or in parallel with identical output.
    """

    def __init__(self, spec: ResamplerSpec):
        if not isinstance(spec, ResamplerSpec):
            raise MalformedConfigError("spec must be a ResamplerSpec")
        self.spec = spec
        self._cache: Optional[Tuple[TimeSeries, object]] = None

    # -- public API ---------------------------------------------------------

    def bootstrap(self, series: SeriesLike, config: RunConfig) -> Iterator[BootstrapReplicate]:
        """Yield config.n_bootstraps replicates lazily, in ordinal order."""
        series = validate_series(as_series(series))
        self._check_feasible(series)
        fitted = self._fitted_for(series)

        def generate():
            for ordinal in range(config.n_bootstraps):
                yield self._make_replicate(series, fitted, ordinal, config)

        return generate()

    def bootstrap_parallel(
        self, series: SeriesLike, config: RunConfig, max_workers: Optional[int] = None
    ) -> List[BootstrapReplicate]:
        """Generate all replicates across worker threads, ordered by ordinal."""
        series = validate_series(as_series(series))
        self._check_feasible(series)
        fitted = self._fitted_for(series)
        ordinals = range(config.n_bootstraps)
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(
                pool.map(lambda k: self._make_replicate(series, fitted, k, config), ordinals)
            )

    def replicate_at(self, series: SeriesLike, ordinal: int, config: RunConfig) -> BootstrapReplicate:
        """Generate the single replicate with the given ordinal."""
        if not 0 <= ordinal:
            raise ValueError("ordinal must be non-negative")
        series = validate_series(as_series(series))
        self._check_feasible(series)
        fitted = self._fitted_for(series)
        return self._make_replicate(series, fitted, ordinal, config)

    # -- setup --------------------------------------------------------------

    def _check_feasible(self, series: TimeSeries) -> None:
        spec = self.spec
        n = series.n
        needs_full_blocks = spec.method in PURE_BLOCK_METHODS and spec.method is not Method.STATIONARY_BLOCK
        if (needs_full_blocks or spec.method is Method.BLOCK_MARKOV) and spec.block_length > n:
            raise BlockTooLongError(
                f"block length exceeds series length ({spec.block_length} > {n})"
            )
        if spec.method in (Method.BLOCK_STATISTIC_PRESERVING, Method.BLOCK_DISTRIBUTION):
            inner = spec.inner
            if inner.method is not Method.STATIONARY_BLOCK and inner.block_length > n:
                raise BlockTooLongError(
                    f"block length exceeds series length ({inner.block_length} > {n})"
                )

    def _fitted_for(self, series: TimeSeries):
        cached = self._cache
        if cached is not None and cached[0] is series:
            return cached[1]
        fitted = self._fit(series)
        self._cache = (series, fitted)
        return fitted

    def _fit(self, series: TimeSeries):
        spec = self.spec
        method = spec.method
        if method in (Method.WHOLE_RESIDUAL, Method.BLOCK_RESIDUAL):
            return self._fit_ar(series, warn_nonstationary=False)
        if method in (Method.WHOLE_SIEVE, Method.BLOCK_SIEVE):
            return self._fit_ar(series, warn_nonstationary=True)
        if method in (Method.WHOLE_STATISTIC_PRESERVING, Method.BLOCK_STATISTIC_PRESERVING):
            values = series.values
            return _Moments(means=values.mean(axis=0), stds=values.std(axis=0))
        if method is Method.WHOLE_DISTRIBUTION:
            if spec.distribution is Distribution.GAUSSIAN:
                if series.n < 2:
                    raise InsufficientDataError("Gaussian fitting requires at least 2 rows")
                params = tuple(
                    (float(column.mean()), float(column.std())) for column in series.values.T
                )
                return _GaussianFit(params=params)
            return None
        if method is Method.WHOLE_MARKOV:
            channel_models = tuple(
                models.fit_markov(column, spec.n_states) for column in series.values.T
            )
            return _MarkovFit(channel_models=channel_models)
        if method is Method.BLOCK_MARKOV:
            return self._fit_block_chain(series)
        return None

    def _resolve_ar_order(self, series: TimeSeries) -> int:
        spec = self.spec
        if spec.ar_order is not None:
            return spec.ar_order
        n = series.n
        p_max = spec.max_ar_order if spec.max_ar_order is not None else models.default_max_ar_order(n)
        votes = []
        for column in series.values.T:
            try:
                votes.append(models.select_ar_order(column, p_max))
            except SingularDesignError:
                votes.append(1)
        return max(votes)

    def _fit_ar(self, series: TimeSeries, warn_nonstationary: bool) -> _ArFit:
        order = self._resolve_ar_order(series)
        n = series.n
        if n < order + 2:
            raise InsufficientDataError(
                f"series of length {n} is too short for an AR({order}) fit"
            )
        channel_models = []
        for channel, column in enumerate(series.values.T):
            try:
                model = models.fit_ar(column, order, channel)
            except SingularDesignError:
                # Mean-only fallback, padded to the common order so residual
                # vectors stay aligned across channels.
                mean = float(column.mean())
                residuals = column[order:] - mean
                model = models.FittedArModel(
                    order=order,
                    intercept=mean,
                    coefficients=np.zeros(order),
                    residuals=residuals,
                    sigma2=float(residuals @ residuals) / max(len(residuals), 1),
                    channel=channel,
                )
            channel_models.append(model)
        if warn_nonstationary:
            for model in channel_models:
                if not models.ar_is_stationary(model):
                    warnings.warn(
                        f"fitted AR polynomial for channel {model.channel} has a root "
                        "on or inside the unit circle",
                        NonStationaryFitWarning,
                        stacklevel=3,
                    )
        centered = np.column_stack(
            [model.residuals - model.residuals.mean() for model in channel_models]
        )
        inner = self.spec.inner
        if inner is not None and inner.method is not Method.STATIONARY_BLOCK:
            if inner.block_length > len(centered):
                raise BlockTooLongError(
                    f"block length exceeds series length ({inner.block_length} > {len(centered)})"
                )
        return _ArFit(order=order, channel_models=tuple(channel_models), residuals=centered)

    def _fit_block_chain(self, series: TimeSeries) -> _BlockChainFit:
        spec = self.spec
        length = spec.block_length
        n_blocks = series.n // length
        if n_blocks < 2:
            raise InsufficientDataError(
                f"block length {length} leaves fewer than 2 full blocks in {series.n} rows"
            )
        if spec.n_states is not None and spec.n_states > n_blocks:
            raise MalformedConfigError(
                f"n_states cannot exceed the number of full blocks ({spec.n_states} > {n_blocks})"
            )
        grand_means = series.values[: n_blocks * length].reshape(n_blocks, -1).mean(axis=1)
        n_states = spec.n_states
        if n_states is None:
            n_states = min(models.default_n_states(series.n), n_blocks)
        chain = models.fit_markov(grand_means, n_states)
        return _BlockChainFit(chain=chain, block_length=length, n_blocks=n_blocks)

    # -- per-replicate generation --------------------------------------------

    def _make_replicate(
        self, series: TimeSeries, fitted, ordinal: int, config: RunConfig
    ) -> BootstrapReplicate:
        rng = replicate_rng(config.seed, ordinal)
        values, indices = self._replicate(series, fitted, rng)
        return BootstrapReplicate(
            ordinal=ordinal,
            values=values,
            indices=indices if config.return_indices else None,
        )

    def _replicate(self, series: TimeSeries, fitted, rng) -> Tuple[np.ndarray, np.ndarray]:
        method = self.spec.method
        if method in PURE_BLOCK_METHODS:
            out, indices, _ = _block_replicate(series.values, self.spec, rng)
            return out, indices
        if method in (Method.WHOLE_RESIDUAL, Method.BLOCK_RESIDUAL):
            return self._residual_replicate(series, fitted, rng)
        if method in (Method.WHOLE_SIEVE, Method.BLOCK_SIEVE):
            return self._sieve_replicate(series, fitted, rng)
        if method in (Method.WHOLE_STATISTIC_PRESERVING, Method.BLOCK_STATISTIC_PRESERVING):
            return self._statistic_preserving_replicate(series, fitted, rng)
        if method in (Method.WHOLE_DISTRIBUTION, Method.BLOCK_DISTRIBUTION):
            return self._distribution_replicate(series, fitted, rng)
        if method is Method.WHOLE_MARKOV:
            return self._whole_markov_replicate(series, fitted, rng)
        if method is Method.BLOCK_MARKOV:
            return self._block_markov_replicate(series, fitted, rng)
        raise MalformedConfigError(f"unknown method {method!r}")

    def _draw_innovations(self, fitted: _ArFit, count: int, rng) -> Tuple[np.ndarray, np.ndarray]:
        """Resample ``count`` rows of centered residuals, iid or block-wise.

        The same index sequence is shared by every channel, preserving
        contemporaneous dependence between channel innovations.
        """
        residuals = fitted.residuals
        m = len(residuals)
        if m == 0:
            raise InsufficientDataError("no residuals available to resample")
        inner = self.spec.inner
        if inner is None:
            indices = rng.integers(0, m, size=count)
            return residuals[indices], indices
        drawn_values = []
        drawn_indices = []
        total = 0
        while total < count:
            values, indices, _ = _block_replicate(residuals, inner, rng)
            drawn_values.append(values)
            drawn_indices.append(indices)
            total += m
        values = np.concatenate(drawn_values)[:count]
        indices = np.concatenate(drawn_indices)[:count]
        return values, indices

    def _residual_replicate(self, series: TimeSeries, fitted: _ArFit, rng):
        n = series.n
        order = fitted.order
        innovations, res_indices = self._draw_innovations(fitted, n - order, rng)
        out = np.empty_like(series.values)
        out[:order] = series.values[:order]
        for channel, model in enumerate(fitted.channel_models):
            out[order:, channel] = _recurse(
                model.intercept,
                model.coefficients,
                series.values[:order, channel],
                innovations[:, channel],
            )
        indices = np.concatenate(
            [np.full(order, -1, dtype=np.int64), order + res_indices]
        )
        return out, indices

    def _sieve_replicate(self, series: TimeSeries, fitted: _ArFit, rng):
        n = series.n
        order = fitted.order
        total = SIEVE_BURN_IN + n
        innovations, res_indices = self._draw_innovations(fitted, total, rng)
        out = np.empty_like(series.values)
        for channel, model in enumerate(fitted.channel_models):
            mean = series.values[:, channel].mean()
            path = _recurse(
                model.intercept,
                model.coefficients,
                np.full(order, mean),
                innovations[:, channel],
            )
            out[:, channel] = path[SIEVE_BURN_IN:]
        indices = (order + res_indices[SIEVE_BURN_IN:]).astype(np.int64)
        return out, indices

    def _statistic_preserving_replicate(self, series: TimeSeries, fitted: _Moments, rng):
        spec = self.spec
        values = series.values
        n = series.n
        needs_scale = spec.statistic in (Statistic.STD, Statistic.MEAN_AND_STD)
        for _ in range(1 + MAX_DEGENERATE_REDRAWS):
            if spec.method is Method.WHOLE_STATISTIC_PRESERVING:
                indices = rng.integers(0, n, size=n)
                base = values[indices]
            else:
                base, indices, _ = _block_replicate(values, spec.inner, rng)
            base_means = base.mean(axis=0)
            if needs_scale:
                base_stds = base.std(axis=0)
                if np.any(base_stds == 0.0):
                    continue
                scale = fitted.stds / base_stds
                if spec.statistic is Statistic.STD:
                    out = base_means + scale * (base - base_means)
                else:
                    out = fitted.means + scale * (base - base_means)
            else:
                out = base + (fitted.means - base_means)
            return out, indices.astype(np.int64)
        raise DegenerateReplicateError(
            f"all {1 + MAX_DEGENERATE_REDRAWS} draws had a zero-variance channel"
        )

    def _distribution_replicate(self, series: TimeSeries, fitted, rng):
        spec = self.spec
        values = series.values
        n, d = values.shape
        if spec.method is Method.WHOLE_DISTRIBUTION:
            if spec.distribution is Distribution.GAUSSIAN:
                out = np.empty_like(values)
                for channel, (mu, sigma) in enumerate(fitted.params):
                    out[:, channel] = mu + sigma * rng.standard_normal(n)
                return out, np.full(n, -1, dtype=np.int64)
            indices = rng.integers(0, n, size=n).astype(np.int64)
            return values[indices], indices
        source_indices, lengths = _block_index_draw(spec.inner, n, rng)
        out = np.empty_like(values)
        indices = np.empty(n, dtype=np.int64)
        offset = 0
        for run in blocks.truncated_run_lengths(lengths, n):
            source = source_indices[offset : offset + run]
            block_values = values[source]
            if spec.distribution is Distribution.GAUSSIAN:
                for channel in range(d):
                    column = block_values[:, channel]
                    out[offset : offset + run, channel] = column.mean() + column.std() * rng.standard_normal(run)
                indices[offset : offset + run] = -1
            else:
                picks = rng.integers(0, run, size=run)
                out[offset : offset + run] = block_values[picks]
                indices[offset : offset + run] = source[picks]
            offset += run
        return out, indices

    def _whole_markov_replicate(self, series: TimeSeries, fitted: _MarkovFit, rng):
        n, d = series.values.shape
        out = np.empty_like(series.values)
        first_indices = None
        for channel, model in enumerate(fitted.channel_models):
            path, indices = models.sample_markov_path(model, n, rng)
            out[:, channel] = path
            if channel == 0:
                first_indices = indices
        if d == 1:
            return out, first_indices
        # Channels walk independent chains, so no single source row exists.
        return out, np.full(n, -1, dtype=np.int64)

    def _block_markov_replicate(self, series: TimeSeries, fitted: _BlockChainFit, rng):
        n = series.n
        length = fitted.block_length
        steps = math.ceil(n / length)
        _, block_ids = models.sample_markov_path(fitted.chain, steps, rng)
        row_indices = np.concatenate(
            [np.arange(bid * length, bid * length + length, dtype=np.int64) for bid in block_ids]
        )[:n]
        return series.values[row_indices], row_indices


def _recurse(intercept, coefficients, lag_init, innovations) -> np.ndarray:
    """Generate an AR path: x_t = c + sum_j phi_j x_{t-j} + e_t.

    ``lag_init`` supplies the p values preceding the first generated step,
    oldest first. Runs in plain Python floats; the step count is the length
    of ``innovations``.
    """
    order = len(coefficients)
    if order == 0:
        return intercept + np.asarray(innovations)
    c = float(intercept)
    phi = [float(v) for v in coefficients]
    state = [float(v) for v in lag_init]
    out = []
    for eps in innovations.tolist():
        acc = c + eps
        for j in range(order):
            acc += phi[j] * state[-1 - j]
        out.append(acc)
        state.append(acc)
        del state[0]
    return np.asarray(out)


def bootstrap(
    series: SeriesLike, spec: ResamplerSpec, config: RunConfig
) -> Iterator[BootstrapReplicate]:
    """Convenience wrapper: build a Resampler and yield its replicates."""
    return Resampler(spec).bootstrap(series, config)
