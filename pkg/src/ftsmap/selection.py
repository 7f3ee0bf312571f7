"""Choosing the number of intervals: AIC scan and the average-based rule."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple, TextIO

import numpy as np

from .chaos import TimeSeries
from .errors import DegenerateInputError, FtsError, InputError
from .fts import fit, forecast_many
from .partition import Interval, uniform_partition, universe_of


class AverageLength(NamedTuple):
    length: float
    n: int
    half_average: float
    base: float


def decade_base(mu: float) -> float:
    """``10**p`` such that ``10**p < mu <= 10**(p + 1)``."""
    if not mu > 0:
        raise InputError(f"base is undefined for {mu}")
    p = math.floor(math.log10(mu))
    # log10 can be off by one ulp around exact powers of ten
    if 10.0**p >= mu:
        p -= 1
    elif 10.0 ** (p + 1) < mu:
        p += 1
    return 10.0**p


def average_based_length(series: TimeSeries, universe: Interval | None = None) -> AverageLength:
    """Interval length from half the mean absolute first difference.

    The decade base is taken from the mean difference itself; the half-mean
    is then rounded to the nearest multiple of that base, ties upward.
    """
    values = np.asarray(series.values, dtype=float)
    if values.size < 2:
        raise InputError("need at least two samples")
    mean_diff = float(np.mean(np.abs(np.diff(values))))
    if mean_diff == 0.0:
        raise DegenerateInputError("a constant series has no first differences")
    half = mean_diff / 2.0
    base = decade_base(mean_diff)
    length = math.floor(half / base + 0.5) * base
    universe = universe if universe is not None else universe_of(series)
    n = max(2, math.ceil(universe.length / length - 1e-9))
    return AverageLength(length, n, half, base)


def aic(rss: float, N: int, n: int) -> float:
    """``N * ln(RSS / N) + 2 n``; a zero RSS is floored at 1e-300."""
    if N < 1 or n < 1:
        raise InputError("N and n must be positive")
    return N * math.log(max(rss, 1e-300) / N) + 2 * n


def in_sample_rss(series: TimeSeries, n: int, universe: Interval) -> tuple[float, int]:
    """Residual sum of squares of one-step forecasts on the fitting data."""
    model = fit(series, uniform_partition(universe, n))
    values = series.values
    predicted = forecast_many(model, values[:-1]).values
    resid = values[1:] - predicted
    return float(np.dot(resid, resid)), resid.size


@dataclass(frozen=True)
class AicSelection:
    n_star: int
    curve: list[tuple[int, float]]
    perfect_fit: tuple[int, ...] = ()
    skipped: tuple[int, ...] = ()

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["n", "aic"])
        for n, value in self.curve:
            writer.writerow([n, f"{value:.17g}"])


def first_local_minimum(curve: list[tuple[int, float]]) -> int:
    """Smallest n whose AIC is strictly below that of n + 1, else the argmin."""
    if not curve:
        raise InputError("empty AIC curve")
    by_n = dict(curve)
    for n, value in sorted(curve):
        if n + 1 in by_n and value < by_n[n + 1]:
            return n
    return min(sorted(curve), key=lambda item: item[1])[0]


def select_intervals_aic(
    series: TimeSeries,
    n_min: int = 2,
    n_max: int = 30,
    universe: Interval | None = None,
) -> AicSelection:
    """Fit a model for every n in ``[n_min, n_max]`` and pick by AIC."""
    if n_min < 2 or n_max < n_min:
        raise InputError(f"invalid interval range [{n_min}, {n_max}]")
    universe = universe if universe is not None else universe_of(series)
    curve, perfect, skipped = [], [], []
    for n in range(n_min, n_max + 1):
        try:
            rss, count = in_sample_rss(series, n, universe)
        except FtsError:
            skipped.append(n)
            continue
        if rss <= 0:
            perfect.append(n)
        curve.append((n, aic(rss, count, n)))
    if not curve:
        raise InputError("no interval count in range could be fitted")
    return AicSelection(first_local_minimum(curve), curve, tuple(perfect), tuple(skipped))
