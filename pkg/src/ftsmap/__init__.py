"""First-order fuzzy time series forecasting of the chaotic logistic map."""

from .chaos import MapConfig, TimeSeries, acf, add_noise, bifurcation_scan, generate, logistic_step
from .errors import (
    DegenerateInputError,
    EmptyForecastError,
    FitError,
    FtsError,
    InputError,
    MissingRepresentativeError,
)
from .fts import FtsModel, defuzzify, fit, forecast_fuzzy, forecast_h, forecast_one, min_outer
from .partition import Interval, PartitionScheme, fuzzify, membership, uniform_partition
from .selection import aic, average_based_length, select_intervals_aic

__version__ = "0.1.0"
