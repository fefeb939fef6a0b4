"""Empirical rate distributions: nearest-rank percentiles, KS distance, log mean."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class EmptySamples(ValueError):
    pass


class NonPositiveSample(ValueError):
    pass


@dataclass(frozen=True)
class RateStats:
    """Pooled per-user samples, sorted ascending on construction."""

    samples: np.ndarray

    def __init__(self, samples):
        arr = np.sort(np.asarray(samples, dtype=float).ravel())
        object.__setattr__(self, "samples", arr)

    @property
    def n(self) -> int:
        return self.samples.size


def percentile(stats: RateStats, p: float) -> float:
    """Nearest-rank percentile: the ceil(p/100 * n)-th smallest sample, p in (0, 100]."""
    if stats.n == 0:
        raise EmptySamples("no samples")
    if not 0.0 < p <= 100.0:
        raise ValueError(f"p must be in (0, 100], got {p}")
    x = p * stats.n / 100.0
    # snap float noise so an exact-integer rank never rounds up
    k = int(round(x)) if abs(x - round(x)) < 1e-9 else math.ceil(x)
    k = max(k, 1)
    return float(stats.samples[k - 1])


def ks_distance(a: RateStats, b: RateStats) -> float:
    """Sup-norm distance between the two empirical CDFs, in [0, 1]."""
    if a.n == 0 or b.n == 0:
        raise EmptySamples("both sample sets must be non-empty")
    grid = np.concatenate([a.samples, b.samples])
    fa = np.searchsorted(a.samples, grid, side="right") / a.n
    fb = np.searchsorted(b.samples, grid, side="right") / b.n
    return float(np.max(np.abs(fa - fb)))


def mean_log(stats: RateStats) -> float:
    """Mean of ln(sample) in nats; rejects non-positive samples."""
    if stats.n == 0:
        raise EmptySamples("no samples")
    if stats.samples[0] <= 0:
        raise NonPositiveSample("samples must be positive; exclude zero-rate users first")
    return float(np.mean(np.log(stats.samples)))


def positive_part(stats: RateStats):
    """Split into (positive-sample stats, count of excluded non-positive samples)."""
    cut = np.searchsorted(stats.samples, 0.0, side="right")
    if cut == stats.n:
        raise NonPositiveSample("all samples are non-positive")
    return RateStats(stats.samples[cut:]), int(cut)
