"""Batch command line front end: CSV series in, newline-delimited records out."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from typing import Any, Dict, List, Optional, Sequence, TextIO

import numpy as np

from . import stats
from .compliance import check_resampler
from .config import parse_toml_dict, spec_from_dict, spec_to_dict
from .errors import (
    BlockTooLongError,
    DegenerateReplicateError,
    EmptySeriesError,
    EmptyStateError,
    InsufficientDataError,
    MalformedConfigError,
    NonFiniteError,
    NonUniformLengthsError,
    SingularDesignError,
    TooManyFailedFitsError,
)
from .resamplers import Resampler
from .types import (
    Distribution,
    Method,
    ResamplerSpec,
    RunConfig,
    Statistic,
    TimeSeries,
    Window,
    as_series,
)

FORMAT_VERSION = 1

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_MODEL = 4
EXIT_NONCOMPLIANT = 5

_INPUT_ERRORS = (
    FileNotFoundError,
    IsADirectoryError,
    PermissionError,
    EmptySeriesError,
    NonFiniteError,
)
_CONFIG_ERRORS = (MalformedConfigError, BlockTooLongError, NonUniformLengthsError)
_MODEL_ERRORS = (
    InsufficientDataError,
    SingularDesignError,
    TooManyFailedFitsError,
    DegenerateReplicateError,
    EmptyStateError,
)


class InputFormatError(Exception):
    """The input file exists but cannot be parsed as a series."""


def _fmt(value: float) -> str:
    # 17 significant digits: lossless double round-trip.
    return "%.17g" % value


def read_series_csv(path: str) -> TimeSeries:
    """Read a series: one column per channel, optional header row.

    The first row is treated as a header when any of its cells is not
    numeric.
    """
    with open(path, newline="") as handle:
        rows = [row for row in csv.reader(handle) if row]
    if not rows:
        raise EmptySeriesError(f"no rows in {path}")
    header: Optional[List[str]] = None
    try:
        [float(cell) for cell in rows[0]]
    except ValueError:
        header = [cell.strip() for cell in rows[0]]
        rows = rows[1:]
    if not rows:
        raise EmptySeriesError(f"no data rows in {path}")
    width = len(rows[0])
    data = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise InputFormatError(
                f"row {i + 1} has {len(row)} columns, expected {width}"
            )
        try:
            data[i] = [float(cell) for cell in row]
        except ValueError as exc:
            raise InputFormatError(f"row {i + 1}: {exc}") from exc
    if header is not None and len(header) != width:
        raise InputFormatError("header width does not match data width")
    return TimeSeries(data, header)


def write_series_csv(path: str, series, names=None) -> None:
    """Write a series in the same format read_series_csv accepts."""
    if names is not None and not isinstance(series, TimeSeries):
        series = TimeSeries(series, tuple(names))
    else:
        series = as_series(series)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        if series.channel_names is not None:
            writer.writerow(series.channel_names)
        for row in series.values:
            writer.writerow([_fmt(value) for value in row])


def _values_json(values: np.ndarray) -> str:
    flat = [_fmt(value) for value in values.ravel().tolist()]
    d = values.shape[1]
    rows = ("[" + ",".join(flat[i : i + d]) + "]" for i in range(0, len(flat), d))
    return "[" + ",".join(rows) + "]"


def _vector_json(vector) -> str:
    return "[" + ",".join(_fmt(value) for value in np.asarray(vector, dtype=float)) + "]"


def _metadata_line(series: TimeSeries, spec: ResamplerSpec, config: RunConfig) -> str:
    record = {
        "type": "metadata",
        "format_version": FORMAT_VERSION,
        "n": series.n,
        "d": series.d,
        "spec": spec_to_dict(spec),
        "seed": config.seed,
        "n_bootstraps": config.n_bootstraps,
    }
    if series.channel_names is not None:
        record["channels"] = list(series.channel_names)
    return json.dumps(record)


def _positive_or_auto(text: str):
    if text == "auto":
        return None
    return int(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsboot",
        description="Time-series bootstrapping: generate replicates, summaries, and forecasts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="input CSV path")
        p.add_argument("--output", help="output path (default: stdout)")

    def add_spec_flags(p):
        p.add_argument("--config", help="TOML config file with the resampler spec")
        p.add_argument("--method", choices=[m.value for m in Method])
        p.add_argument("--block-length", type=int)
        p.add_argument("--geometric-p", type=float)
        p.add_argument("--window", choices=[w.value for w in Window])
        p.add_argument("--tukey-alpha", type=float)
        p.add_argument("--ar-order", type=_positive_or_auto, metavar="P|auto")
        p.add_argument("--max-ar-order", type=_positive_or_auto, metavar="P|auto")
        p.add_argument("--distribution", choices=[d.value for d in Distribution])
        p.add_argument("--statistic", choices=[s.value for s in Statistic])
        p.add_argument("--n-states", type=_positive_or_auto, metavar="S|auto")
        p.add_argument("--inner-method", choices=[m.value for m in Method])
        p.add_argument("--inner-block-length", type=int)

    def add_run_flags(p, default_bootstraps=100):
        p.add_argument("--n-bootstraps", type=int, default=default_bootstraps)
        p.add_argument("--seed", type=int, help="RNG seed (default: $TSBOOT_SEED, else 0)")

    p_boot = sub.add_parser("bootstrap", help="emit replicates as newline-delimited records")
    add_io(p_boot)
    add_spec_flags(p_boot)
    add_run_flags(p_boot)
    p_boot.add_argument("--return-indices", action="store_true")

    p_sum = sub.add_parser("summarize", help="aggregate per-replicate means")
    add_io(p_sum)
    add_spec_flags(p_sum)
    add_run_flags(p_sum)
    p_sum.add_argument("--coverage", type=float, action="append")

    p_fc = sub.add_parser("forecast", help="bagging forecast intervals")
    add_io(p_fc)
    add_spec_flags(p_fc)
    add_run_flags(p_fc)
    p_fc.add_argument("--horizon", type=int, default=12)
    p_fc.add_argument("--coverage", type=float, action="append")

    p_check = sub.add_parser("check", help="run the resampler compliance suite")
    add_io(p_check, needs_input=False)
    add_spec_flags(p_check)
    add_run_flags(p_check, default_bootstraps=5)

    return parser


# Flags forwarded into the ResamplerSpec; forecast treats AR flags as
# forecaster parameters instead, so they are excluded there.
_SPEC_FLAG_KEYS = (
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
_AR_FLAG_KEYS = ("ar_order", "max_ar_order")


def _spec_from_args(args, include_ar_flags: bool = True) -> ResamplerSpec:
    data: Dict[str, Any] = {}
    if args.config:
        with open(args.config, "rb") as handle:
            data = parse_toml_dict(handle.read().decode("utf-8"))
        if not isinstance(data, dict):
            raise MalformedConfigError("config must be a table of keys")
    for key in _SPEC_FLAG_KEYS:
        if not include_ar_flags and key in _AR_FLAG_KEYS:
            continue
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    inner_overrides = {}
    if args.inner_method is not None:
        inner_overrides["method"] = args.inner_method
    if args.inner_block_length is not None:
        inner_overrides["block_length"] = args.inner_block_length
    if inner_overrides:
        inner = data.get("inner")
        if not isinstance(inner, dict):
            inner = {}
        inner.update(inner_overrides)
        if "method" not in inner:
            inner["method"] = Method.MOVING_BLOCK.value
        data["inner"] = inner
    if "method" not in data:
        raise MalformedConfigError("a method is required (via --method or --config)")
    return spec_from_dict(data)


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("TSBOOT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise MalformedConfigError(f"TSBOOT_SEED is not an integer: {env!r}") from exc
    return 0


def _coverage_levels(args, default: float) -> List[float]:
    levels = args.coverage if args.coverage else [default]
    for level in levels:
        if not 0.0 < level < 1.0:
            raise MalformedConfigError(f"coverage must be in (0, 1), got {level}")
    return levels


def _open_output(args):
    if args.output:
        return open(args.output, "w"), True
    return sys.stdout, False


def _cmd_bootstrap(args) -> int:
    series = read_series_csv(args.input)
    spec = _spec_from_args(args)
    config = RunConfig(
        n_bootstraps=args.n_bootstraps,
        seed=_resolve_seed(args),
        return_indices=args.return_indices,
    )
    replicates = Resampler(spec).bootstrap(series, config)
    handle, owned = _open_output(args)
    try:
        handle.write(_metadata_line(series, spec, config) + "\n")
        for rep in replicates:
            parts = [
                '"type":"replicate"',
                f'"ordinal":{rep.ordinal}',
                f'"values":{_values_json(rep.values)}',
            ]
            if rep.indices is not None:
                parts.append('"indices":[' + ",".join(str(int(i)) for i in rep.indices) + "]")
            handle.write("{" + ",".join(parts) + "}\n")
            handle.flush()
    finally:
        if owned:
            handle.close()
    return EXIT_OK


def _cmd_summarize(args) -> int:
    series = read_series_csv(args.input)
    spec = _spec_from_args(args)
    if args.n_bootstraps < 1:
        raise MalformedConfigError("summarize requires n_bootstraps >= 1")
    levels = _coverage_levels(args, default=0.9)
    config = RunConfig(n_bootstraps=args.n_bootstraps, seed=_resolve_seed(args))
    summary = stats.summarize(Resampler(spec).bootstrap(series, config))
    intervals = {
        "%g" % level: {
            "lower": [
                stats.percentile_interval(summary.per_replicate[:, ch], level)[0]
                for ch in range(series.d)
            ],
            "upper": [
                stats.percentile_interval(summary.per_replicate[:, ch], level)[1]
                for ch in range(series.d)
            ],
        }
        for level in levels
    }
    handle, owned = _open_output(args)
    try:
        handle.write(_metadata_line(series, spec, config) + "\n")
        record = (
            '{"type":"summary","statistic":"mean"'
            f',"mean":{_vector_json(summary.mean)}'
            f',"std":{_vector_json(summary.std)}'
            + ',"intervals":{'
            + ",".join(
                f'"{label}":{{"lower":{_vector_json(band["lower"])},"upper":{_vector_json(band["upper"])}}}'
                for label, band in intervals.items()
            )
            + "}}"
        )
        handle.write(record + "\n")
    finally:
        if owned:
            handle.close()
    return EXIT_OK


def _cmd_forecast(args) -> int:
    series = read_series_csv(args.input)
    spec = _spec_from_args(args, include_ar_flags=False)
    if args.n_bootstraps < 1:
        raise MalformedConfigError("forecast requires n_bootstraps >= 1")
    if args.horizon < 1:
        raise MalformedConfigError("horizon must be >= 1")
    levels = _coverage_levels(args, default=0.8)
    config = RunConfig(n_bootstraps=args.n_bootstraps, seed=_resolve_seed(args))
    result = stats.bagging_forecast(
        series,
        spec,
        horizon=args.horizon,
        config=config,
        coverage_levels=levels,
        ar_order=args.ar_order,
        max_ar_order=args.max_ar_order,
    )
    handle, owned = _open_output(args)
    try:
        handle.write(_metadata_line(series, spec, config) + "\n")
        for step in range(result.horizon):
            parts = []
            for level in levels:
                lower, upper = result.bands[level]
                label = "%g" % level
                parts.append(
                    f'"{label}":{{"lower":{_vector_json(lower[step])}'
                    f',"upper":{_vector_json(upper[step])}}}'
                )
            handle.write(
                f'{{"type":"forecast","step":{step + 1}'
                f',"point":{_vector_json(result.point[step])}'
                + ',"bands":{' + ",".join(parts) + "}}\n"
            )
    finally:
        if owned:
            handle.close()
    return EXIT_OK


def _cmd_check(args) -> int:
    spec = _spec_from_args(args)
    report = check_resampler(spec, n_bootstraps=args.n_bootstraps, seed=_resolve_seed(args))
    handle, owned = _open_output(args)
    try:
        handle.write(
            f"# check method={spec.method.value} n_bootstraps={args.n_bootstraps} "
            f"seed={_resolve_seed(args)}\n"
        )
        for check in report.checks:
            if check.passed:
                handle.write(f"PASS {check.name}\n")
            else:
                detail = f": {check.detail}" if check.detail else ""
                handle.write(f"FAIL {check.name}{detail}\n")
    finally:
        if owned:
            handle.close()
    return EXIT_OK if report.passed else EXIT_NONCOMPLIANT


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    commands = {
        "bootstrap": _cmd_bootstrap,
        "summarize": _cmd_summarize,
        "forecast": _cmd_forecast,
        "check": _cmd_check,
    }
    try:
        return commands[args.command](args)
    except InputFormatError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except _INPUT_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except _CONFIG_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    except _MODEL_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
