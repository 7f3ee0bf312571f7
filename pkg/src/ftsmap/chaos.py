"""Logistic map trajectories, noise, autocorrelation and bifurcation scans."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .errors import DegenerateInputError, InputError


@dataclass(frozen=True)
class MapConfig:
    """Parameters of one logistic-map run.

    Parameters
    ----------
    r
        bifurcation parameter, within [0, 4]
    x1
        initial condition, within [0, 1]
    n
        number of samples to produce (x1 included)
    """

    r: float
    x1: float
    n: int

    def __post_init__(self):
        if not (0.0 <= self.r <= 4.0):
            raise InputError(f"r must lie in [0, 4], got {self.r}")
        if not (0.0 <= self.x1 <= 1.0):
            raise InputError(f"x1 must lie in [0, 1], got {self.x1}")
        if int(self.n) != self.n or self.n < 1:
            raise InputError(f"n must be a positive integer, got {self.n}")


@dataclass(frozen=True)
class TimeSeries:
    """An ordered sequence of observations with optional generation metadata."""

    values: np.ndarray
    meta: MapConfig | None = None
    noise_sigma: float | None = None
    seed: int | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise InputError("a time series needs at least one value")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    def __getitem__(self, item):
        return self.values[item]

    def head(self, count: int) -> "TimeSeries":
        """Return the first `count` samples, keeping the metadata."""
        return TimeSeries(self.values[:count], self.meta, self.noise_sigma, self.seed)


@dataclass(frozen=True)
class AcfResult:
    correlations: np.ndarray
    significance_bound: float
    n_samples: int = field(default=0)

    def within_bound(self, first_lag: int = 1) -> bool:
        return bool(np.all(np.abs(self.correlations[first_lag:]) < self.significance_bound))


def logistic_step(x: float, r: float) -> float:
    """One application of the logistic recurrence.

    The product is evaluated strictly left to right, ``(r * x) * (1 - x)``,
    so that trajectories are reproducible bit for bit.
    """
    if not (0.0 <= x <= 1.0):
        raise InputError(f"x must lie in [0, 1], got {x}")
    if not (0.0 <= r <= 4.0):
        raise InputError(f"r must lie in [0, 4], got {r}")
    return r * x * (1.0 - x)


def _iterate(x: float, r: float, count: int) -> list[float]:
    out = [x]
    for _ in range(count - 1):
        x = r * x * (1.0 - x)
        out.append(x)
    return out


def generate(config: MapConfig) -> TimeSeries:
    """Iterate the map ``config.n - 1`` times starting from ``config.x1``."""
    values = _iterate(float(config.x1), float(config.r), int(config.n))
    return TimeSeries(np.array(values), meta=config)


def add_noise(series: TimeSeries, sigma: float, seed: int) -> TimeSeries:
    """Add white Gaussian measurement noise of standard deviation `sigma`.

    Draws come from ``numpy.random.default_rng(seed)`` so a given seed always
    reproduces the same contamination.
    """
    if not sigma >= 0:
        raise InputError(f"sigma must be non-negative, got {sigma}")
    if sigma == 0:
        return TimeSeries(series.values.copy(), series.meta, 0.0, seed)
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, sigma, size=len(series))
    return TimeSeries(series.values + noise, series.meta, float(sigma), seed)


def acf(series: TimeSeries | Iterable[float], max_lag: int) -> AcfResult:
    """Sample autocorrelation of the mean-removed series at lags 0..max_lag.

    Uses the usual biased estimator (lag-k autocovariance divided by N), so
    the lag-0 value is exactly 1 and every value is bounded by 1.
    """
    values = np.asarray(series.values if isinstance(series, TimeSeries) else list(series), dtype=float)
    n = values.size
    if max_lag < 1 or int(max_lag) != max_lag:
        raise InputError(f"max_lag must be a positive integer, got {max_lag}")
    if n <= max_lag:
        raise InputError(f"series of length {n} is too short for max_lag={max_lag}")
    if np.ptp(values) == 0.0:
        raise DegenerateInputError("autocorrelation of a constant series is undefined")
    centred = values - values.mean()
    c0 = float(np.dot(centred, centred))
    corr = np.empty(max_lag + 1)
    corr[0] = 1.0
    for lag in range(1, max_lag + 1):
        corr[lag] = np.dot(centred[:-lag], centred[lag:]) / c0
    return AcfResult(corr, 1.96 / math.sqrt(n), n)


def bifurcation_scan(
    r_min: float = 2.5,
    r_max: float = 4.0,
    r_steps: int = 400,
    transient: int = 500,
    keep: int = 200,
    x1: float = 0.5,
) -> np.ndarray:
    """Long-run orbit samples of the map over a uniform grid of r.

    Returns an array of shape ``(r_steps * keep, 2)`` holding ``(r, x)``
    pairs, grouped by r in ascending order.
    """
    if not (0.0 <= r_min < r_max <= 4.0):
        raise InputError(f"need 0 <= r_min < r_max <= 4, got [{r_min}, {r_max}]")
    if r_steps < 2 or transient < 1 or keep < 1:
        raise InputError("r_steps must be >= 2, transient and keep >= 1")
    if not (0.0 <= x1 <= 1.0):
        raise InputError(f"x1 must lie in [0, 1], got {x1}")
    rs = np.linspace(r_min, r_max, r_steps)
    x = np.full(r_steps, float(x1))
    for _ in range(transient):
        x = rs * x * (1.0 - x)
    kept = np.empty((keep, r_steps))
    for i in range(keep):
        x = rs * x * (1.0 - x)
        kept[i] = x
    return np.column_stack([np.repeat(rs, keep), kept.T.ravel()])


def write_series_csv(series: TimeSeries, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["k", "x"])
    for k, x in enumerate(series.values, start=1):
        writer.writerow([k, f"{x:.17g}"])


def read_series_csv(stream: TextIO) -> TimeSeries:
    """Read a ``k,x`` CSV, or any CSV whose last column holds the values."""
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None:
        raise InputError("empty series file")
    column = header.index("x") if "x" in header else len(header) - 1
    values = [float(row[column]) for row in reader if row]
    if not values:
        raise InputError("series file has no rows")
    return TimeSeries(np.array(values))
