"""Block-length sampling, block layout generation, and taper window weights."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Tuple, Union

import numpy as np

from .errors import BlockTooLongError, NonUniformLengthsError
from .types import Window

WEIGHT_FLOOR = 0.1


@dataclass(frozen=True)
class FixedLength:
    """Every block has the same length."""

    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("block length must be >= 1")


@dataclass(frozen=True)
class GeometricLength:
    """Block lengths follow P(l) = p * (1 - p)^(l - 1) with mean 1/p."""

    p: float

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise ValueError("geometric p must be in (0, 1]")


BlockLengthSampler = Union[FixedLength, GeometricLength]


class Regime(Enum):
    MOVING = "Moving"
    CIRCULAR = "Circular"
    STATIONARY = "Stationary"
    NON_OVERLAPPING = "NonOverlapping"


@dataclass(frozen=True)
class BlockLayout:
    """Ordered (start, length) block descriptors, with optional circular wrap."""

    blocks: Tuple[Tuple[int, int], ...]
    wrap: bool

    def total_length(self) -> int:
        return sum(length for _, length in self.blocks)


def sample_block_lengths(sampler: BlockLengthSampler, n: int, rng) -> List[int]:
    """Draw block lengths until their total covers n.

    Stops as soon as coverage is reached, so dropping the last length leaves
    the total short of n. Geometric draws larger than n are redrawn; a block
    cannot exceed the series.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(sampler, FixedLength):
        count = math.ceil(n / sampler.length)
        return [sampler.length] * count
    lengths: List[int] = []
    total = 0
    while total < n:
        length = int(rng.geometric(sampler.p))
        if length > n:
            continue
        lengths.append(length)
        total += length
    return lengths


def generate_layout(regime: Regime, n: int, lengths: Sequence[int], rng) -> BlockLayout:
    """Draw block start positions for the given regime.

    Moving: starts uniform on [0, n - l]. Circular and Stationary: starts
    uniform on [0, n) with wrap. NonOverlapping: starts drawn with replacement
    from the grid {0, l, 2l, ...} of full blocks; any trailing partial segment
    is excluded from the grid.
    """
    if not lengths:
        raise ValueError("at least one block length is required")
    lengths = [int(length) for length in lengths]
    longest = max(lengths)
    if longest > n:
        raise BlockTooLongError(
            f"block length exceeds series length ({longest} > {n})"
        )
    count = len(lengths)
    if regime is Regime.MOVING:
        if len(set(lengths)) == 1:
            starts = rng.integers(0, n - lengths[0] + 1, size=count)
        else:
            starts = np.array([int(rng.integers(0, n - length + 1)) for length in lengths])
        wrap = False
    elif regime in (Regime.CIRCULAR, Regime.STATIONARY):
        starts = rng.integers(0, n, size=count)
        wrap = True
    elif regime is Regime.NON_OVERLAPPING:
        if len(set(lengths)) != 1:
            raise NonUniformLengthsError(
                "non-overlapping layout requires equal block lengths"
            )
        slots = n // lengths[0]
        starts = lengths[0] * rng.integers(0, slots, size=count)
        wrap = False
    else:
        raise ValueError(f"unknown regime {regime!r}")
    blocks = tuple((int(start), length) for start, length in zip(starts, lengths))
    return BlockLayout(blocks=blocks, wrap=wrap)


def materialize_indices(layout: BlockLayout, n: int) -> np.ndarray:
    """Expand a layout into source-row indices, truncated to at most n.

    Blocks are concatenated in order; with wrap, indices are taken modulo n.
    A layout that covers at least n rows yields exactly n indices.
    """
    if not layout.blocks:
        return np.empty(0, dtype=np.int64)
    parts = []
    covered = 0
    for start, length in layout.blocks:
        take = min(length, n - covered)
        run = np.arange(start, start + take, dtype=np.int64)
        parts.append(run % n if layout.wrap else run)
        covered += take
        if covered == n:
            break
    return np.concatenate(parts)


def truncated_run_lengths(lengths: Sequence[int], n: int) -> List[int]:
    """Lengths of the output runs after truncating the concatenation to n."""
    runs: List[int] = []
    covered = 0
    for length in lengths:
        take = min(int(length), n - covered)
        if take <= 0:
            break
        runs.append(take)
        covered += take
    return runs


def _raw_window(kind: Window, length: int, tukey_alpha: float) -> np.ndarray:
    m = length
    k = np.arange(m, dtype=float)
    if kind is Window.BARTLETT:
        return 1.0 - np.abs(2.0 * k / (m - 1) - 1.0)
    if kind is Window.HANNING:
        return 0.5 * (1.0 - np.cos(2.0 * np.pi * k / (m - 1)))
    if kind is Window.HAMMING:
        return 0.54 - 0.46 * np.cos(2.0 * np.pi * k / (m - 1))
    if kind is Window.BLACKMAN:
        return (
            0.42
            - 0.5 * np.cos(2.0 * np.pi * k / (m - 1))
            + 0.08 * np.cos(4.0 * np.pi * k / (m - 1))
        )
    if kind is Window.TUKEY:
        alpha = tukey_alpha
        if alpha == 0.0:
            return np.ones(m)
        x = k / (m - 1)
        w = np.ones(m)
        rising = x < alpha / 2.0
        falling = x > 1.0 - alpha / 2.0
        w[rising] = 0.5 * (1.0 + np.cos(np.pi * (2.0 * x[rising] / alpha - 1.0)))
        w[falling] = 0.5 * (1.0 + np.cos(np.pi * (2.0 * x[falling] / alpha - 2.0 / alpha + 1.0)))
        return w
    raise ValueError(f"unknown window {kind!r}")


def window_weights(kind: Window, length: int, tukey_alpha: float = 0.5) -> np.ndarray:
    """Taper weights for one block of the given length.

    The raw window is scaled so its peak is exactly 1, then clamped below at
    WEIGHT_FLOOR so endpoints attenuate observations instead of deleting
    them. A length-1 block is left unweighted.
    """
    if length < 1:
        raise ValueError("window length must be >= 1")
    if length == 1:
        return np.ones(1)
    raw = _raw_window(kind, length, tukey_alpha)
    peak = raw.max()
    if peak <= 0.0:
        return np.ones(length)
    return np.maximum(raw / peak, WEIGHT_FLOOR)
