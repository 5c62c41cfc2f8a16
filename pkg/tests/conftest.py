"""Shared helpers for the test suite."""

import numpy as np
import pytest


def sim_ar(coefficients, n, seed, intercept=0.0, sigma=1.0, burn=200):
    """Simulate a stationary AR process with known parameters."""
    coefficients = np.asarray(coefficients, dtype=float)
    p = len(coefficients)
    rng = np.random.default_rng(seed)
    total = n + burn
    x = np.zeros(total + p)
    eps = rng.normal(0.0, sigma, total)
    for t in range(total):
        x[t + p] = intercept + coefficients @ x[t : t + p][::-1] + eps[t]
    return x[p + burn :]


def lag1_acf(x):
    x = np.asarray(x, dtype=float)
    d = x - x.mean()
    return float(d[1:] @ d[:-1] / (d @ d))


class FakeRng:
    """Scripted stand-in for numpy Generator; pops values in draw order."""

    def __init__(self, script):
        self.script = list(script)

    def _pop(self):
        if not self.script:
            raise AssertionError("script exhausted")
        return self.script.pop(0)

    def integers(self, low, high=None, size=None):
        if size is None:
            return int(self._pop())
        return np.array([int(self._pop()) for _ in range(size)], dtype=np.int64)

    def geometric(self, p, size=None):
        if size is None:
            return int(self._pop())
        return np.array([int(self._pop()) for _ in range(size)], dtype=np.int64)

    def random(self, size=None):
        if size is None:
            return float(self._pop())
        return np.array([float(self._pop()) for _ in range(size)], dtype=float)


@pytest.fixture
def fake_rng_cls():
    return FakeRng
