"""Contract compliance suite for resampler implementations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from .config import spec_roundtrip
from .resamplers import Resampler
from .types import ResamplerSpec, RunConfig, TimeSeries

CHECK_SERIES_LENGTH = 50


def _reference_series() -> TimeSeries:
    # Fixed synthetic input: smooth signal plus seeded noise, non-constant.
    rng = np.random.Generator(np.random.PCG64(987654321))
    values = np.sin(np.arange(CHECK_SERIES_LENGTH) * 0.3) + 0.5 * rng.standard_normal(
        CHECK_SERIES_LENGTH
    )
    return TimeSeries(values)


@dataclass(frozen=True)
class ComplianceCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ComplianceReport:
    spec: ResamplerSpec
    checks: List[ComplianceCheck]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


def check_resampler(
    spec: ResamplerSpec,
    n_bootstraps: int = 5,
    seed: int = 1234,
    resampler_factory: Optional[Callable[[ResamplerSpec], object]] = None,
) -> ComplianceReport:
    """Run the resampler contract suite on a fixed synthetic series.

    Checks output length, determinism under a fixed seed, replicate count,
    index validity, and config round-trip. Failures become report entries;
    nothing is raised, so the suite is safe to run on broken candidates.
    The factory hook lets tests substitute resampler doubles.
    """
    factory = resampler_factory or Resampler
    series = _reference_series()
    checks: List[ComplianceCheck] = []
    config = RunConfig(n_bootstraps=n_bootstraps, seed=seed, return_indices=True)

    first_run = None
    try:
        first_run = list(factory(spec).bootstrap(series, config))
        checks.append(ComplianceCheck("generates", True))
    except Exception as exc:
        checks.append(ComplianceCheck("generates", False, f"{type(exc).__name__}: {exc}"))
        return ComplianceReport(spec=spec, checks=checks)

    n, d = series.values.shape
    bad_shape = [
        rep.values.shape for rep in first_run if rep.values.shape != (n, d)
    ]
    checks.append(
        ComplianceCheck(
            "length",
            not bad_shape,
            "" if not bad_shape else f"expected {(n, d)}, saw {bad_shape[0]}",
        )
    )

    checks.append(
        ComplianceCheck(
            "count",
            len(first_run) == n_bootstraps,
            "" if len(first_run) == n_bootstraps else f"yielded {len(first_run)}",
        )
    )

    try:
        second_run = list(factory(spec).bootstrap(series, config))
        same = len(second_run) == len(first_run) and all(
            np.array_equal(a.values, b.values)
            and (a.indices is None) == (b.indices is None)
            and (a.indices is None or np.array_equal(a.indices, b.indices))
            for a, b in zip(first_run, second_run)
        )
        checks.append(
            ComplianceCheck("determinism", same, "" if same else "reruns differ")
        )
    except Exception as exc:
        checks.append(ComplianceCheck("determinism", False, f"{type(exc).__name__}: {exc}"))

    index_problems = []
    for rep in first_run:
        if rep.indices is None:
            index_problems.append(f"replicate {rep.ordinal} has no indices")
        elif len(rep.indices) != n:
            index_problems.append(f"replicate {rep.ordinal} index length {len(rep.indices)}")
        elif np.any((rep.indices < -1) | (rep.indices >= n)):
            index_problems.append(f"replicate {rep.ordinal} index out of range")
    checks.append(
        ComplianceCheck(
            "indices",
            not index_problems,
            "" if not index_problems else index_problems[0],
        )
    )

    try:
        restored = spec_roundtrip(spec)
        same_spec = restored == spec
        checks.append(
            ComplianceCheck(
                "params_roundtrip", same_spec, "" if same_spec else f"got {restored!r}"
            )
        )
    except Exception as exc:
        checks.append(
            ComplianceCheck("params_roundtrip", False, f"{type(exc).__name__}: {exc}")
        )

    return ComplianceReport(spec=spec, checks=checks)
