"""Thin keyword-parameter binding over the tsboot resampling engine.

The binding marshals arguments and arrays; every number is produced by the
engine underneath. Parameter names follow the command-line vocabulary with
underscores, so one set of names works across both interfaces.
"""

from __future__ import annotations

from typing import Any, Dict, Iterator

import numpy as np

from tsboot import Resampler, ResamplerSpec, RunConfig
from tsboot.config import spec_to_dict

__version__ = "0.1.0"

__all__ = ["TimeSeriesBootstrap"]

_SPEC_KEYS = (
    "method",
    "block_length",
    "geometric_p",
    "window",
    "tukey_alpha",
    "ar_order",
    "max_ar_order",
    "distribution",
    "statistic",
    "n_states",
)
_INNER_KEYS = ("inner_method", "inner_block_length")
_RUN_KEYS = ("n_bootstraps", "seed")


def _spec_from_params(params: Dict[str, Any]) -> ResamplerSpec:
    kwargs: Dict[str, Any] = {}
    for key in _SPEC_KEYS:
        value = params.get(key)
        if value is None or value == "auto":
            continue
        kwargs[key] = value
    inner_method = params.get("inner_method")
    inner_length = params.get("inner_block_length")
    if inner_method is not None or inner_length is not None:
        inner_kwargs: Dict[str, Any] = {"method": inner_method or "MovingBlock"}
        if inner_length is not None:
            inner_kwargs["block_length"] = inner_length
        kwargs["inner"] = ResamplerSpec(**inner_kwargs)
    return ResamplerSpec(**kwargs)


def _flatten_spec(spec: ResamplerSpec) -> Dict[str, Any]:
    data = spec_to_dict(spec)
    inner = data.pop("inner", None)
    if inner is not None:
        data["inner_method"] = inner["method"]
        if "block_length" in inner:
            data["inner_block_length"] = inner["block_length"]
    return data


def _coerce_series(series) -> np.ndarray:
    arr = np.asarray(series)
    if arr.dtype.kind not in "fiub":
        raise TypeError(f"series must be numeric, got dtype {arr.dtype}")
    return np.asarray(arr, dtype=float)


class TimeSeriesBootstrap:
    """Resampler handle configured from keyword parameters.

    >>> boot = TimeSeriesBootstrap(method="MovingBlock", block_length=3,
    ...                            n_bootstraps=3, seed=42)
    >>> for sample in boot.bootstrap(range(10)):
    ...     pass  # sample is a (10, 1) array

    One instance serves one thread; create separate instances for
    concurrent use.
    """

    def __init__(self, **params: Any):
        self._params = dict(params)
        self._rebuild()

    def _rebuild(self) -> None:
        unknown = set(self._params) - set(_SPEC_KEYS) - set(_INNER_KEYS) - set(_RUN_KEYS)
        if unknown:
            raise TypeError(f"unknown parameters: {sorted(unknown)}")
        self._spec = _spec_from_params(self._params)
        self._resampler = Resampler(self._spec)

    def get_params(self) -> Dict[str, Any]:
        """Engine-normalized parameters, flattened to the shared vocabulary."""
        params = _flatten_spec(self._spec)
        params["n_bootstraps"] = int(self._params.get("n_bootstraps", 1))
        params["seed"] = int(self._params.get("seed", 0))
        return params

    def set_params(self, **params: Any) -> "TimeSeriesBootstrap":
        self._params.update(params)
        self._rebuild()
        return self

    def bootstrap(self, series, return_indices: bool = False) -> Iterator:
        """Yield replicates lazily as contiguous array copies.

        Each item is an (n, d) values array, or a (values, indices) pair
        when return_indices is set. Replicate k+1 is not computed until
        the consumer asks for it.
        """
        values = _coerce_series(series)
        config = RunConfig(
            n_bootstraps=int(self._params.get("n_bootstraps", 1)),
            seed=int(self._params.get("seed", 0)),
            return_indices=return_indices,
        )
        stream = self._resampler.bootstrap(values, config)

        def generate():
            for rep in stream:
                out = np.array(rep.values, dtype=float, order="C")
                if return_indices:
                    yield out, np.array(rep.indices)
                else:
                    yield out

        return generate()
