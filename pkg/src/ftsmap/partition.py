"""Universe of discourse, equal-length partitions and trapezoidal fuzzification."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .chaos import TimeSeries
from .errors import DegenerateInputError, InputError


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or not self.a < self.b:
            raise InputError(f"interval needs finite a < b, got [{self.a}, {self.b}]")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def midpoint(self) -> float:
        return (self.a + self.b) / 2.0


@dataclass(frozen=True)
class PartitionScheme:
    """A universe split into contiguous intervals, one fuzzy set per interval.

    `bounds` holds the ``n + 1`` edges; interval ``i`` is
    ``[bounds[i], bounds[i + 1]]``.
    """

    bounds: np.ndarray

    def __post_init__(self):
        bounds = np.array(self.bounds, dtype=float)
        if bounds.ndim != 1 or bounds.size < 3:
            raise InputError("a partition needs at least two intervals")
        if not np.all(np.diff(bounds) > 0):
            raise InputError("partition bounds must be strictly increasing")
        bounds.setflags(write=False)
        object.__setattr__(self, "bounds", bounds)

    @property
    def n(self) -> int:
        return self.bounds.size - 1

    @property
    def universe(self) -> Interval:
        return Interval(float(self.bounds[0]), float(self.bounds[-1]))

    @property
    def intervals(self) -> list[Interval]:
        return [Interval(float(a), float(b)) for a, b in zip(self.bounds[:-1], self.bounds[1:])]

    @property
    def lower(self) -> np.ndarray:
        return self.bounds[:-1]

    @property
    def upper(self) -> np.ndarray:
        return self.bounds[1:]

    @property
    def midpoints(self) -> np.ndarray:
        return (self.bounds[:-1] + self.bounds[1:]) / 2.0

    @property
    def length(self) -> float:
        return float((self.bounds[-1] - self.bounds[0]) / self.n)


@dataclass(frozen=True)
class FuzzifiedSeries:
    vectors: np.ndarray  # shape (len(series), n)
    labels: np.ndarray
    scheme: PartitionScheme

    def __len__(self):
        return self.labels.size


def uniform_partition(universe: Interval, n: int) -> PartitionScheme:
    """Split `universe` into `n` contiguous intervals of equal length."""
    if int(n) != n or n < 2:
        raise InputError(f"need at least 2 intervals, got {n}")
    bounds = np.linspace(universe.a, universe.b, int(n) + 1)
    return PartitionScheme(bounds)


def universe_of(series: TimeSeries) -> Interval:
    """Smallest interval holding every observation."""
    lo, hi = float(np.min(series.values)), float(np.max(series.values))
    if lo == hi:
        raise DegenerateInputError("a constant series has no universe of discourse")
    return Interval(lo, hi)


def membership(interval: Interval, x: float) -> float:
    """Trapezoidal membership of `x` in the fuzzy set built on `interval`.

    The flat top covers ``[a, b]``; each ramp has the width of the interval,
    reaching zero at ``2a - b`` and ``2b - a``.
    """
    a, b = interval.a, interval.b
    if a <= x <= b:
        return 1.0
    if x <= 2 * a - b or x >= 2 * b - a:
        return 0.0
    if x < a:
        return min(1.0, (x - 2 * a + b) / (b - a))
    return min(1.0, (2 * b - a - x) / (b - a))


def membership_matrix(scheme: PartitionScheme, x) -> np.ndarray:
    """Vectorised `membership` for every set of `scheme` and every value in `x`.

    Returns shape ``(len(x), n)``; element-for-element identical to calling
    `membership` in a loop.
    """
    x = np.asarray(x, dtype=float).reshape(-1, 1)
    a = np.asarray(scheme.lower).reshape(1, -1)
    b = np.asarray(scheme.upper).reshape(1, -1)
    width = b - a
    rising = np.minimum(1.0, (x - 2 * a + b) / width)
    falling = np.minimum(1.0, (2 * b - a - x) / width)
    out = np.where(x < a, rising, falling)
    out = np.where((x <= 2 * a - b) | (x >= 2 * b - a), 0.0, out)
    out = np.where((a <= x) & (x <= b), 1.0, out)
    return out


def fuzzify_values(values, scheme: PartitionScheme) -> tuple[np.ndarray, np.ndarray]:
    """Membership vectors and argmax labels (lowest index on ties)."""
    vectors = membership_matrix(scheme, values)
    if vectors.size and np.any(vectors.max(axis=1) == 0.0):
        k = int(np.flatnonzero(vectors.max(axis=1) == 0.0)[0])
        x = float(np.asarray(values, dtype=float).ravel()[k])
        raise DegenerateInputError(f"value {x} lies outside every fuzzy set")
    return vectors, np.argmax(vectors, axis=1)


def fuzzify(series: TimeSeries, scheme: PartitionScheme) -> FuzzifiedSeries:
    """Evaluate every observation against every fuzzy set of `scheme`."""
    vectors, labels = fuzzify_values(series.values, scheme)
    vectors.setflags(write=False)
    labels.setflags(write=False)
    return FuzzifiedSeries(vectors, labels, scheme)


def write_partition_csv(scheme: PartitionScheme, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["index", "a", "b"])
    for i, (a, b) in enumerate(zip(scheme.lower, scheme.upper)):
        writer.writerow([i, f"{a:.17g}", f"{b:.17g}"])
