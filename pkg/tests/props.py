"""Property checks shared by the hypothesis suite and the acceptance gate.

Each ``check_*`` takes a seed, builds one random case and asserts.
"""

import io
from dataclasses import dataclass

import numpy as np

from ftsmap.chaos import MapConfig, TimeSeries, add_noise, generate
from ftsmap.evaluation import IntervalChoice, SplitSpec, fit_models, noise_experiment
from ftsmap.fts import defuzzify, extract_relationships, fit, forecast_fuzzy, forecast_many, min_outer, representative_vector
from ftsmap.partition import Interval, fuzzify, uniform_partition

from oracles import fit_reference, forecast_reference


@dataclass(frozen=True)
class PermutedScheme:
    """Partition whose set indices are relabelled: slot p is base set order[p]."""

    base: object
    order: np.ndarray

    @property
    def n(self):
        return self.base.n

    @property
    def universe(self):
        return self.base.universe

    @property
    def lower(self):
        return self.base.lower[self.order]

    @property
    def upper(self):
        return self.base.upper[self.order]

    @property
    def midpoints(self):
        return self.base.midpoints[self.order]


def random_case(seed, max_len=40, max_n=9):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_n + 1))
    length = int(rng.integers(2, max_len + 1))
    values = rng.uniform(0.0, 1.0, length)
    return rng, TimeSeries(values), uniform_partition(Interval(0.0, 1.0), n)


def check_definitions_oracle(seed):
    """Fit + one-step forecasts equal the loop-based oracle exactly (len <= 12, n <= 4)."""
    rng, series, scheme = random_case(seed, max_len=12, max_n=4)
    if rng.random() < 0.3:
        # snap some values onto interval edges to exercise tie handling
        values = series.values.copy()
        idx = rng.integers(0, values.size, size=max(1, values.size // 3))
        values[idx] = rng.choice(scheme.bounds, size=idx.size)
        series = TimeSeries(values)
    model = fit(series, scheme)
    bounds = scheme.bounds.tolist()
    groups, R = fit_reference(series.values.tolist(), bounds)
    assert {i: list(js) for i, js in model.groups.items()} == groups
    assert model.relation.tolist() == R
    probes = np.concatenate([series.values, rng.uniform(-0.3, 1.3, 8)])
    got = forecast_many(model, probes)
    for x, value, flag in zip(probes, got.values, got.fallback):
        ref_value, ref_flag = forecast_reference(groups, R, bounds, float(x))
        assert value == ref_value and bool(flag) == ref_flag, (seed, x, value, ref_value)


def check_composition_monotone(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 10))
    R = rng.uniform(size=(n, n))
    a = rng.uniform(size=n)
    bigger = np.minimum(1.0, a + rng.uniform(0, 0.5, n) * (rng.random(n) < 0.6))
    lo, hi = forecast_fuzzy(a, R), forecast_fuzzy(bigger, R)
    assert np.all(lo <= hi)
    assert np.all((lo >= 0) & (lo <= 1))
    assert np.all(lo <= R.max(axis=0))


def check_union_dominance(seed):
    rng, series, scheme = random_case(seed)
    model = fit(series, scheme)
    fz = fuzzify(series, scheme)
    rels = extract_relationships(fz)
    parts = [min_outer(representative_vector(fz, i), representative_vector(fz, j)) for i, j in rels]
    for part in parts:
        assert np.all(model.relation >= part)
    assert np.array_equal(model.relation, np.maximum.reduce(parts))
    if len(parts) > 1:
        drop = int(rng.integers(len(parts)))
        reduced = np.maximum.reduce([p for k, p in enumerate(parts) if k != drop])
        assert np.all(reduced <= model.relation)


def check_defuzzify_range(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 12))
    lo = rng.uniform(-5, 5)
    scheme = uniform_partition(Interval(lo, lo + rng.uniform(0.1, 10)), n)
    a = rng.uniform(size=n) * (rng.random(n) < 0.7)
    if rng.random() < 0.3:
        a[rng.integers(n, size=2)] = a.max() if a.max() > 0 else 1.0
    if a.max() == 0:
        a[0] = 0.5
    value = defuzzify(a, scheme)
    assert scheme.universe.a <= value <= scheme.universe.b


def check_relabel_equivariance(seed):
    rng, series, scheme = random_case(seed)
    order = rng.permutation(scheme.n)
    perm = PermutedScheme(scheme, order)
    base_model = fit(series, scheme)
    perm_model = fit(series, perm)
    # slot p of the permuted model is set order[p] of the base model
    assert np.array_equal(perm_model.relation, base_model.relation[np.ix_(order, order)])
    probes = np.concatenate([series.values, rng.uniform(0, 1, 10)])
    a = forecast_many(base_model, probes)
    b = forecast_many(perm_model, probes)
    assert np.array_equal(a.fallback, b.fallback)
    np.testing.assert_allclose(a.values, b.values, rtol=0, atol=1e-12)


def check_no_leakage(seed):
    rng = np.random.default_rng(seed)
    r = float(rng.uniform(3.6, 4.0))
    x1 = float(rng.uniform(0.05, 0.95))
    split = SplitSpec(200, 100)
    series = generate(MapConfig(r, x1, split.total))
    altered = series.values.copy()
    idx = rng.integers(split.train, split.total, size=20)
    altered[idx] = rng.uniform(0, 1, idx.size)
    models = ("model1", "model2", "model3", "model4")
    choice = IntervalChoice("aic", n_max=12)
    a = fit_models(series.head(split.train), models, choice)
    b = fit_models(TimeSeries(altered).head(split.train), models, choice)
    assert a.n_intervals == b.n_intervals
    assert np.array_equal(a.fts.relation, b.fts.relation) and a.fts.groups == b.fts.groups
    for name in ("model2", "model3", "model4"):
        assert a.ar[name].theta == b.ar[name].theta


def check_seed_determinism(seed):
    rng = np.random.default_rng(seed)
    x1 = float(rng.uniform(0.1, 0.9))
    sigma = float(rng.uniform(0.0, 0.2))
    kwargs = dict(x1_grid=[x1], sigma=sigma, h=int(rng.integers(1, 4)), seed=seed,
                  split=SplitSpec(120, 60), intervals=IntervalChoice("aic", universe=None, n_max=8))
    assert _report_text(noise_experiment(**kwargs)) == _report_text(noise_experiment(**kwargs))
    clean = generate(MapConfig(3.9, x1, 50))
    assert np.array_equal(add_noise(clean, sigma, seed).values, add_noise(clean, sigma, seed).values)


def _report_text(report):
    buf = io.StringIO()
    report.write_csv(buf)
    return buf.getvalue()


PROPERTIES = {
    "composition monotonicity": check_composition_monotone,
    "union dominance": check_union_dominance,
    "defuzzification range": check_defuzzify_range,
    "relabel equivariance": check_relabel_equivariance,
    "no leakage": check_no_leakage,
    "seed determinism": check_seed_determinism,
}
