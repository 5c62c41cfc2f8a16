"""Binding marshalling: CLI equivalence, laziness, parameter echo."""

import json
import subprocess
import sys

import numpy as np
import pytest

from tsboot import Method, Resampler, ResamplerSpec
from tsboot.config import spec_to_dict
from tsboot.errors import BlockTooLongError
from tsboot_bindings import TimeSeriesBootstrap


def make_series(n=40, d=1, seed=500):
    rng = np.random.default_rng(seed)
    base = np.cumsum(rng.standard_normal(n)) * 0.2 + rng.standard_normal(n)
    if d == 1:
        return base
    return np.column_stack([base] + [rng.standard_normal(n) for _ in range(d - 1)])


EQUIVALENCE_CASES = [
    (dict(method="MovingBlock", block_length=3), ["--method", "MovingBlock", "--block-length", "3"], 2),
    (dict(method="StationaryBlock", geometric_p=0.25), ["--method", "StationaryBlock", "--geometric-p", "0.25"], 1),
    (dict(method="TaperedBlock", block_length=5, window="Hanning"), ["--method", "TaperedBlock", "--block-length", "5", "--window", "Hanning"], 1),
    (dict(method="WholeResidual", ar_order=2), ["--method", "WholeResidual", "--ar-order", "2"], 1),
    (dict(method="WholeDistribution", distribution="Empirical"), ["--method", "WholeDistribution", "--distribution", "Empirical"], 1),
]


def run_cli_bootstrap(csv_path, flags, seed, n_bootstraps):
    result = subprocess.run(
        [sys.executable, "-m", "tsboot", "bootstrap", "--input", str(csv_path),
         "--seed", str(seed), "--n-bootstraps", str(n_bootstraps)] + flags,
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0, result.stderr
    lines = [json.loads(line) for line in result.stdout.strip().splitlines()]
    assert lines[0]["type"] == "metadata"
    return [np.array(rec["values"], dtype=float) for rec in lines[1:]]


class TestCliEquivalence:
    @pytest.mark.parametrize("params,flags,d", EQUIVALENCE_CASES,
                             ids=[c[0]["method"] for c in EQUIVALENCE_CASES])
    @pytest.mark.parametrize("seed", [0, 1])
    def test_binding_and_cli_agree_elementwise(self, params, flags, d, seed, tmp_path):
        series = make_series(d=d)
        csv_path = tmp_path / "series.csv"
        rows = np.atleast_2d(series.T).T
        csv_path.write_text("".join(",".join("%.17g" % v for v in row) + "\n" for row in rows))

        from_cli = run_cli_bootstrap(csv_path, flags, seed=seed, n_bootstraps=4)
        boot = TimeSeriesBootstrap(n_bootstraps=4, seed=seed, **params)
        from_binding = list(boot.bootstrap(series))

        assert len(from_cli) == len(from_binding) == 4
        for cli_values, bound_values in zip(from_cli, from_binding):
            assert cli_values.shape == bound_values.shape
            assert np.array_equal(cli_values, bound_values)


class TestLaziness:
    def test_consuming_one_of_hundred_computes_one(self, monkeypatch):
        calls = {"n": 0}
        original = Resampler._make_replicate

        def counting(self, *args, **kwargs):
            calls["n"] += 1
            return original(self, *args, **kwargs)

        monkeypatch.setattr(Resampler, "_make_replicate", counting)
        boot = TimeSeriesBootstrap(method="MovingBlock", block_length=3,
                                   n_bootstraps=100, seed=1)
        stream = boot.bootstrap(np.arange(30.0))
        assert calls["n"] == 0
        next(stream)
        assert calls["n"] == 1

    def test_zero_replicates_is_empty(self):
        boot = TimeSeriesBootstrap(method="MovingBlock", block_length=3,
                                   n_bootstraps=0, seed=1)
        assert list(boot.bootstrap(np.arange(12.0))) == []


class TestSurface:
    def test_ramp_shapes(self):
        boot = TimeSeriesBootstrap(method="MovingBlock", block_length=3,
                                   n_bootstraps=3, seed=42)
        samples = list(boot.bootstrap(np.arange(10.0)))
        assert [s.shape for s in samples] == [(10, 1)] * 3

    def test_yields_owned_contiguous_arrays(self):
        boot = TimeSeriesBootstrap(method="MovingBlock", block_length=4,
                                   n_bootstraps=2, seed=2)
        for sample in boot.bootstrap(np.arange(16.0)):
            assert sample.flags.c_contiguous
            sample[0, 0] = -1.0

    def test_indices_pairs(self):
        boot = TimeSeriesBootstrap(method="MovingBlock", block_length=5,
                                   n_bootstraps=2, seed=3)
        series = np.arange(20.0)
        for values, indices in boot.bootstrap(series, return_indices=True):
            assert indices.shape == (20,)
            assert np.array_equal(values.ravel(), series[indices])

    def test_get_params_echoes_engine_serialization(self):
        boot = TimeSeriesBootstrap(method="BlockResidual", ar_order=1,
                                   inner_method="MovingBlock", inner_block_length=4,
                                   n_bootstraps=9, seed=5)
        params = boot.get_params()
        spec = ResamplerSpec(
            method=Method.BLOCK_RESIDUAL,
            ar_order=1,
            inner=ResamplerSpec(method=Method.MOVING_BLOCK, block_length=4),
        )
        engine_view = spec_to_dict(spec)
        inner = engine_view.pop("inner")
        engine_view["inner_method"] = inner["method"]
        engine_view["inner_block_length"] = inner["block_length"]
        for key, value in engine_view.items():
            assert params[key] == value
        assert params["n_bootstraps"] == 9
        assert params["seed"] == 5

    def test_set_params_returns_self_and_takes_effect(self):
        boot = TimeSeriesBootstrap(method="MovingBlock", block_length=3,
                                   n_bootstraps=1, seed=4)
        same = boot.set_params(block_length=15)
        assert same is boot
        sample = next(boot.bootstrap(np.arange(15.0)))
        assert np.array_equal(sample.ravel(), np.arange(15.0))

    def test_defaults_normalized_into_params(self):
        boot = TimeSeriesBootstrap(method="StationaryBlock", block_length=4)
        params = boot.get_params()
        assert params["geometric_p"] == 0.25
        assert params["n_bootstraps"] == 1
        assert params["seed"] == 0

    def test_non_numeric_series_is_type_error(self):
        boot = TimeSeriesBootstrap(method="MovingBlock", block_length=3, n_bootstraps=1)
        with pytest.raises(TypeError):
            boot.bootstrap(np.array(["a", "b", "c"]))

    def test_unknown_parameter_rejected(self):
        with pytest.raises(TypeError):
            TimeSeriesBootstrap(method="MovingBlock", stride=2)

    def test_engine_diagnostics_surface(self):
        boot = TimeSeriesBootstrap(method="MovingBlock", block_length=50, n_bootstraps=1)
        with pytest.raises(BlockTooLongError) as exc:
            boot.bootstrap(np.arange(10.0))
        assert "block length exceeds series length" in str(exc.value)
