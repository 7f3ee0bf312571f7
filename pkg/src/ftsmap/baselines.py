"""Crisp autoregressive baselines fitted by ordinary least squares.

* ``linear``:    x[k+1] = theta * x[k]
* ``quadratic``: x[k+1] = theta * x[k]**2
* ``combined``:  x[k+1] = theta1 * x[k]**2 + theta2 * x[k]

None has an intercept. Forecasts are never clamped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chaos import TimeSeries
from .errors import FitError, InputError

KINDS = ("linear", "quadratic", "combined")


@dataclass(frozen=True)
class ArModel:
    kind: str
    theta: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown model kind {self.kind!r}")
        expected = 2 if self.kind == "combined" else 1
        if len(self.theta) != expected:
            raise InputError(f"{self.kind} model takes {expected} parameter(s)")

    def step(self, x):
        if self.kind == "linear":
            return self.theta[0] * x
        if self.kind == "quadratic":
            return self.theta[0] * x * x
        return self.theta[0] * x * x + self.theta[1] * x


def fit_ar(series: TimeSeries | np.ndarray, kind: str) -> ArModel:
    values = np.asarray(getattr(series, "values", series), dtype=float)
    if kind not in KINDS:
        raise InputError(f"unknown model kind {kind!r}")
    if values.size < 3:
        raise InputError("need at least three samples to fit")
    x, y = values[:-1], values[1:]
    if kind in ("linear", "quadratic"):
        z = x if kind == "linear" else x * x
        denom = float(np.dot(z, z))
        if denom == 0.0:
            raise FitError(f"{kind} regressor is identically zero")
        return ArModel(kind, (float(np.dot(z, y)) / denom,))

    # 2x2 normal equations for y ~ t1 * x^2 + t2 * x, solved by Cramer's rule
    q = x * x
    s_qq, s_qx, s_xx = float(np.dot(q, q)), float(np.dot(q, x)), float(np.dot(x, x))
    s_qy, s_xy = float(np.dot(q, y)), float(np.dot(x, y))
    det = s_qq * s_xx - s_qx * s_qx
    if not abs(det) > 1e-14 * max(s_qq * s_xx, 1e-300):
        raise FitError("normal equations are singular")
    t1 = (s_qy * s_xx - s_qx * s_xy) / det
    t2 = (s_qq * s_xy - s_qx * s_qy) / det
    return ArModel(kind, (t1, t2))


def predict_ar(model: ArModel, x, h: int = 1):
    """Iterate the fitted recurrence `h` times from `x` (scalar or array)."""
    if int(h) != h or h < 1:
        raise InputError(f"horizon must be a positive integer, got {h}")
    out = np.asarray(x, dtype=float) if np.ndim(x) else float(x)
    for _ in range(int(h)):
        out = model.step(out)
    return out


def training_rss(model: ArModel, series: TimeSeries | np.ndarray) -> float:
    values = np.asarray(getattr(series, "values", series), dtype=float)
    resid = values[1:] - model.step(values[:-1])
    return float(np.dot(resid, resid))
