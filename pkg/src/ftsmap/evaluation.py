"""Train/test evaluation of the four models and the experiment sweeps.

Model names used throughout:

``model1`` fuzzy time series, ``model2`` linear AR, ``model3`` quadratic AR,
``model4`` combined (exact-form) AR.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np

from . import baselines
from .chaos import MapConfig, TimeSeries, add_noise, generate
from .errors import FtsError, InputError
from .fts import FtsModel, fit, forecast_h_many
from .partition import Interval, uniform_partition, universe_of
from .selection import average_based_length, select_intervals_aic

log = logging.getLogger(__name__)

MODELS = ("model1", "model2", "model3", "model4")
AR_KIND = {"model2": "linear", "model3": "quadratic", "model4": "combined"}
REPORT_HEADER = ["sweep_var", "sweep_value", "model", "mse", "variance", "n_intervals", "fallbacks", "theta"]


@dataclass(frozen=True)
class SplitSpec:
    total: int = 1000
    train: int = 500

    def __post_init__(self):
        if not (0 < self.train < self.total):
            raise InputError(f"need 0 < train < total, got train={self.train}, total={self.total}")


@dataclass(frozen=True)
class IntervalChoice:
    """How the fuzzy model picks its partition.

    `method` is ``"aic"``, ``"average"`` or ``"fixed"`` (uses `n`). A `universe`
    of None means the training data's own range.
    """

    method: str = "aic"
    n: int | None = None
    universe: Interval | None = Interval(0.0, 1.0)
    n_min: int = 2
    n_max: int = 30

    def __post_init__(self):
        if self.method not in ("aic", "average", "fixed"):
            raise InputError(f"unknown selection method {self.method!r}")
        if self.method == "fixed" and (self.n is None or self.n < 2):
            raise InputError("fixed selection needs n >= 2")

    def resolve(self, train: TimeSeries) -> tuple[int, Interval]:
        universe = self.universe if self.universe is not None else universe_of(train)
        if self.method == "fixed":
            return int(self.n), universe
        if self.method == "average":
            return average_based_length(train, universe).n, universe
        return select_intervals_aic(train, self.n_min, self.n_max, universe).n_star, universe

    def describe(self) -> str:
        universe = "data range" if self.universe is None else f"[{self.universe.a:g}, {self.universe.b:g}]"
        detail = f"n={self.n}" if self.method == "fixed" else f"n in [{self.n_min}, {self.n_max}]"
        return f"{self.method} ({detail}, universe {universe})"


@dataclass(frozen=True)
class ErrorSummary:
    mse: float
    variance: float
    n_fallbacks: int = 0
    n_intervals: int | None = None
    theta: tuple[float, ...] = ()
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    @classmethod
    def failure(cls, message: str, n_intervals: int | None = None) -> "ErrorSummary":
        return cls(math.nan, math.nan, 0, n_intervals, (), message)


def summarize(errors: np.ndarray, n_fallbacks: int = 0, **extra) -> ErrorSummary:
    """Mean and sample variance of the squared errors."""
    sq = np.asarray(errors, dtype=float) ** 2
    variance = float(np.var(sq, ddof=1)) if sq.size > 1 else 0.0
    return ErrorSummary(float(np.mean(sq)), variance, int(n_fallbacks), **extra)


@dataclass
class FittedModels:
    """Predictors fitted on one training series, plus per-model fit failures."""

    fts: FtsModel | None = None
    ar: dict[str, baselines.ArModel] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)
    n_intervals: int | None = None

    def predict(self, name: str, xs: np.ndarray, h: int) -> tuple[np.ndarray, int]:
        if name == "model1":
            result = forecast_h_many(self.fts, xs, h)
            return result.values, int(result.fallback.sum())
        return baselines.predict_ar(self.ar[name], xs, h), 0


def fit_models(train: TimeSeries, models: Sequence[str], intervals: IntervalChoice) -> FittedModels:
    fitted = FittedModels()
    for name in models:
        if name not in MODELS:
            raise InputError(f"unknown model {name!r}")
        try:
            if name == "model1":
                n, universe = intervals.resolve(train)
                fitted.n_intervals = n
                fitted.fts = fit(train, uniform_partition(universe, n))
            else:
                fitted.ar[name] = baselines.fit_ar(train, AR_KIND[name])
        except FtsError as exc:
            log.warning("fit of %s failed: %s", name, exc)
            fitted.failures[name] = str(exc)
    return fitted


def score(fitted: FittedModels, models: Sequence[str], series: TimeSeries, split: SplitSpec, h: int = 1) -> dict[str, ErrorSummary]:
    """Score h-step forecasts whose targets are exactly the test half.

    The forecast for observation ``k`` is launched from observation ``k - h``.
    """
    if int(h) != h or h < 1:
        raise InputError(f"horizon must be a positive integer, got {h}")
    if split.train < h:
        raise InputError("training half is shorter than the horizon")
    values = series.values[: split.total]
    if values.size < split.total:
        raise InputError(f"series has {values.size} samples, split needs {split.total}")
    targets = values[split.train :]
    launches = values[split.train - h : split.total - h]
    out = {}
    for name in models:
        if name in fitted.failures:
            out[name] = ErrorSummary.failure(fitted.failures[name], fitted.n_intervals if name == "model1" else None)
            continue
        predicted, n_fallbacks = fitted.predict(name, launches, h)
        if name == "model1":
            out[name] = summarize(targets - predicted, n_fallbacks, n_intervals=fitted.n_intervals)
        else:
            out[name] = summarize(targets - predicted, theta=fitted.ar[name].theta)
    return out


def evaluate(
    series: TimeSeries,
    split: SplitSpec = SplitSpec(),
    h: int = 1,
    models: Sequence[str] = ("model1", "model2", "model3"),
    intervals: IntervalChoice = IntervalChoice(),
) -> dict[str, ErrorSummary]:
    """Fit on the first ``split.train`` samples, score h-step forecasts on the rest."""
    fitted = fit_models(series.head(split.train), models, intervals)
    return score(fitted, models, series, split, h)


def evaluate_one_step(models, series: TimeSeries, split: SplitSpec = SplitSpec(), intervals: IntervalChoice = IntervalChoice()):
    return evaluate(series, split, 1, models, intervals)


# -- reports ----------------------------------------------------------------


@dataclass
class ExperimentReport:
    name: str
    sweep_var: str
    rows: list[tuple[float, str, ErrorSummary]] = field(default_factory=list)
    config: dict[str, object] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def add(self, value: float, summaries: dict[str, ErrorSummary]) -> None:
        for model, summary in summaries.items():
            self.rows.append((float(value), model, summary))
        self.rows.sort(key=lambda row: (row[0], row[1]))

    def get(self, value: float, model: str) -> ErrorSummary:
        for v, m, s in self.rows:
            if m == model and math.isclose(v, value, rel_tol=0, abs_tol=1e-12):
                return s
        raise KeyError((value, model))

    def series_of(self, model: str) -> tuple[np.ndarray, np.ndarray]:
        pts = [(v, s.mse) for v, m, s in self.rows if m == model]
        return np.array([p[0] for p in pts]), np.array([p[1] for p in pts])

    @property
    def models(self) -> list[str]:
        return sorted({m for _, m, _ in self.rows})

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(REPORT_HEADER)
        for value, model, s in self.rows:
            writer.writerow([
                self.sweep_var,
                f"{value:.17g}",
                model,
                f"{s.mse:.17g}",
                f"{s.variance:.17g}",
                "" if s.n_intervals is None else s.n_intervals,
                s.n_fallbacks,
                " ".join(f"{t:.17g}" for t in s.theta),
            ])

    def write_config(self, stream: TextIO) -> None:
        stream.write(f"experiment = {self.name}\n")
        stream.write(f"sweep_var = {self.sweep_var}\n")
        for key, value in self.config.items():
            stream.write(f"{key} = {value}\n")
        failures = [(v, m, s.error) for v, m, s in self.rows if s.failed]
        for v, m, err in failures:
            stream.write(f"failed: {self.sweep_var}={v:g} {m}: {err}\n")
        for note in self.notes:
            stream.write(f"note: {note}\n")


def _grid(values: Iterable[float]) -> list[float]:
    grid = [float(v) for v in values]
    if not grid:
        raise InputError("sweep grid is empty")
    return grid


def _config_echo(split: SplitSpec, intervals: IntervalChoice, models: Sequence[str], **extra) -> dict[str, object]:
    echo = dict(extra)
    echo.update(total=split.total, train=split.train, models=",".join(models), intervals=intervals.describe())
    return echo


def sweep_initial_condition(
    r: float = 3.999,
    x1_grid: Iterable[float] | None = None,
    split: SplitSpec = SplitSpec(),
    intervals: IntervalChoice = IntervalChoice("fixed", 9),
    models: Sequence[str] = ("model1", "model2", "model3"),
) -> ExperimentReport:
    """One-step MSE of each model across initial conditions at fixed r."""
    grid = _grid(np.linspace(0.1, 0.9, 81) if x1_grid is None else x1_grid)
    report = ExperimentReport("initial-condition", "x1", config=_config_echo(split, intervals, models, r=r))
    for x1 in grid:
        series = generate(MapConfig(r, x1, split.total))
        report.add(x1, evaluate(series, split, 1, models, intervals))
    return report


def sweep_r(
    x1: float = 0.1,
    r_grid: Iterable[float] | None = None,
    split: SplitSpec = SplitSpec(),
    intervals: IntervalChoice = IntervalChoice("aic"),
    models: Sequence[str] = ("model1", "model2", "model3"),
) -> ExperimentReport:
    """One-step MSE across r, re-selecting the interval count at every r."""
    grid = _grid(np.linspace(3.0, 4.0, 101) if r_grid is None else r_grid)
    report = ExperimentReport("bifurcation-parameter", "r", config=_config_echo(split, intervals, models, x1=x1))
    for r in grid:
        series = generate(MapConfig(r, x1, split.total))
        report.add(r, evaluate(series, split, 1, models, intervals))
    return report


def noise_experiment(
    r: float = 3.999,
    x1_grid: Iterable[float] | None = None,
    sigma: float = 0.1,
    h: int = 3,
    seed: int = 0,
    split: SplitSpec = SplitSpec(),
    intervals: IntervalChoice = IntervalChoice("aic", universe=None),
    models: Sequence[str] = ("model1", "model4"),
) -> ExperimentReport:
    """h-step MSE on noisy observations; grid point ``i`` uses seed ``seed + i``.

    Models are fitted on the noisy training half and scored against the
    noisy test half.
    """
    grid = _grid(np.linspace(0.1, 0.9, 81) if x1_grid is None else x1_grid)
    report = ExperimentReport(
        "noise", "x1", config=_config_echo(split, intervals, models, r=r, sigma=sigma, h=h, seed=seed)
    )
    for i, x1 in enumerate(grid):
        clean = generate(MapConfig(r, x1, split.total))
        noisy = add_noise(clean, sigma, seed + i)
        report.add(x1, evaluate(noisy, split, h, models, intervals))
    return report


def mismatch_experiment(
    r_train: float = 4.0,
    r_test_grid: Iterable[float] | None = None,
    x1: float = 0.1,
    h: int = 3,
    split: SplitSpec = SplitSpec(),
    intervals: IntervalChoice = IntervalChoice("aic"),
    models: Sequence[str] = MODELS,
) -> ExperimentReport:
    """Fit once at `r_train`, then forecast series generated at other r."""
    grid = _grid(np.linspace(3.5, 4.0, 51) if r_test_grid is None else r_test_grid)
    report = ExperimentReport(
        "parameter-mismatch", "r_test", config=_config_echo(split, intervals, models, r_train=r_train, x1=x1, h=h)
    )
    fitted = fit_models(generate(MapConfig(r_train, x1, split.total)).head(split.train), models, intervals)
    for r in grid:
        series = generate(MapConfig(r, x1, split.total))
        report.add(r, score(fitted, models, series, split, h))
    return report


def interval_count_scan(
    r: float = 3.999,
    x1: float = 0.1,
    n_grid: Iterable[int] | None = None,
    split: SplitSpec = SplitSpec(),
    universe: Interval = Interval(0.0, 1.0),
    selection_samples: int = 100,
) -> ExperimentReport:
    """One-step MSE of the fuzzy model for each interval count.

    The AIC and average-based choices, computed on the first
    `selection_samples` observations, are recorded in the report config.
    """
    grid = [int(n) for n in _grid(range(2, 31) if n_grid is None else n_grid)]
    if min(grid) < 2:
        raise InputError("interval counts must be >= 2")
    series = generate(MapConfig(r, x1, split.total))
    head = series.head(selection_samples)
    aic_n = select_intervals_aic(head, universe=universe).n_star
    avg_n = average_based_length(head, universe).n
    report = ExperimentReport(
        "interval-count",
        "n_intervals",
        config=dict(r=r, x1=x1, total=split.total, train=split.train, selection_samples=selection_samples,
                    aic_selected=aic_n, average_selected=avg_n),
    )
    for n in grid:
        choice = IntervalChoice("fixed", n, universe)
        report.add(n, evaluate(series, split, 1, ("model1",), choice))
    return report
