"""First-order fuzzy time series: relationships, relation matrix, forecasting."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import NamedTuple, TextIO

import numpy as np

from .chaos import TimeSeries
from .errors import (
    DegenerateInputError,
    EmptyForecastError,
    InputError,
    MissingRepresentativeError,
)
from .partition import FuzzifiedSeries, PartitionScheme, fuzzify, membership_matrix


class Relationship(NamedTuple):
    lhs: int
    rhs: int


@dataclass(frozen=True)
class FtsModel:
    """A fitted first-order model.

    ``groups`` maps a left-hand set index to the sorted right-hand indices
    seen after it; ``relation`` is the union of all per-relationship
    matrices and is what forecasting actually uses.
    """

    scheme: PartitionScheme
    groups: dict[int, tuple[int, ...]]
    relation: np.ndarray
    representatives: dict[int, np.ndarray] = field(default_factory=dict)
    n_relationships: int = 0

    @property
    def n(self) -> int:
        return self.scheme.n

    @property
    def midpoints(self) -> np.ndarray:
        return self.scheme.midpoints


class Forecasts(NamedTuple):
    values: np.ndarray
    fallback: np.ndarray  # True where persistence was used


def extract_relationships(fz: FuzzifiedSeries) -> list[Relationship]:
    """Label transitions between consecutive samples, first occurrences only."""
    if len(fz) < 2:
        raise InputError("need at least two samples to form a relationship")
    seen = {}
    for i, j in zip(fz.labels[:-1], fz.labels[1:]):
        seen.setdefault(Relationship(int(i), int(j)), None)
    return list(seen)


def group_relationships(rels) -> dict[int, tuple[int, ...]]:
    groups: dict[int, set[int]] = {}
    for lhs, rhs in rels:
        groups.setdefault(int(lhs), set()).add(int(rhs))
    return {lhs: tuple(sorted(rhs)) for lhs, rhs in sorted(groups.items())}


def representative_vector(fz: FuzzifiedSeries, i: int) -> np.ndarray:
    """Membership vector of the earliest sample whose label is `i`.

    This replaces the fixed prototype vector of the classic method.
    """
    hits = np.flatnonzero(fz.labels == i)
    if hits.size == 0:
        raise MissingRepresentativeError(f"no sample is labelled with set {i}")
    return np.array(fz.vectors[hits[0]])


def min_outer(c, b) -> np.ndarray:
    """``D[i, j] = min(c[i], b[j])``."""
    c = np.asarray(c, dtype=float)
    b = np.asarray(b, dtype=float)
    if c.ndim != 1 or c.shape != b.shape:
        raise InputError(f"vector shapes differ: {c.shape} vs {b.shape}")
    return np.minimum(c[:, None], b[None, :])


def fit(series: TimeSeries, scheme: PartitionScheme) -> FtsModel:
    """Learn relationship groups and the relation matrix from `series`."""
    if len(series) < 2:
        raise InputError("need at least two samples to fit")
    fz = fuzzify(series, scheme)
    rels = extract_relationships(fz)
    reps = {i: representative_vector(fz, i) for i in sorted({int(v) for v in fz.labels})}
    relation = np.zeros((scheme.n, scheme.n))
    for lhs, rhs in rels:
        np.maximum(relation, min_outer(reps[lhs], reps[rhs]), out=relation)
    relation.setflags(write=False)
    return FtsModel(scheme, group_relationships(rels), relation, reps, len(rels))


def forecast_fuzzy(a, relation) -> np.ndarray:
    """Max-min composition ``out[j] = max_i min(a[i], R[i, j])``.

    `a` may also be a 2-D stack of vectors, one per row.
    """
    a = np.asarray(a, dtype=float)
    relation = np.asarray(relation, dtype=float)
    if relation.ndim != 2 or relation.shape[0] != a.shape[-1]:
        raise InputError(f"cannot compose vector of size {a.shape[-1]} with {relation.shape} matrix")
    return np.max(np.minimum(a[..., :, None], relation), axis=-2)


def defuzzify(a, scheme) -> float:
    """Crisp value for a fuzzy forecast vector.

    A single maximum gives its interval midpoint; maxima on adjacent
    intervals give the midpoint of their merged span; anything else gives
    the centroid of the interval midpoints weighted by the normalised vector.
    """
    a = np.asarray(a, dtype=float)
    peak = a.max()
    if not peak > 0:
        raise EmptyForecastError("cannot defuzzify an all-zero vector")
    top = np.flatnonzero(a == peak)
    if top.size == 1:
        return float(scheme.midpoints[top[0]])
    lower = np.asarray(scheme.lower)
    upper = np.asarray(scheme.upper)
    top = top[np.argsort(lower[top])]
    if np.all(upper[top[:-1]] == lower[top[1:]]):
        return float((lower[top[0]] + upper[top[-1]]) / 2.0)
    weights = a / a.sum()
    return float((weights * scheme.midpoints).sum())


def forecast_many(model: FtsModel, xs) -> Forecasts:
    """One-step forecasts for every value in `xs`.

    Persistence (returning the input) is used when a value lies outside
    every fuzzy set, when its label never appeared on the left of a
    relationship, or when the composed vector is all zero.
    """
    xs = np.asarray(xs, dtype=float).ravel()
    vectors = membership_matrix(model.scheme, xs)
    out = xs.copy()
    fallback = np.ones(xs.size, dtype=bool)
    if xs.size == 0:
        return Forecasts(out, fallback)
    labels = np.argmax(vectors, axis=1)
    composed = forecast_fuzzy(vectors, model.relation)
    for k in range(xs.size):
        if vectors[k, labels[k]] == 0.0 or int(labels[k]) not in model.groups:
            continue
        if not composed[k].max() > 0:
            continue
        out[k] = defuzzify(composed[k], model.scheme)
        fallback[k] = False
    return Forecasts(out, fallback)


def forecast_one(model: FtsModel, x: float) -> tuple[float, bool]:
    """One-step forecast of `x`; the flag tells whether persistence was used."""
    result = forecast_many(model, [x])
    return float(result.values[0]), bool(result.fallback[0])


def forecast_h_many(model: FtsModel, xs, h: int) -> Forecasts:
    """`h`-step forecasts, defuzzifying and refuzzifying at every step."""
    if int(h) != h or h < 1:
        raise InputError(f"horizon must be a positive integer, got {h}")
    current = np.asarray(xs, dtype=float).ravel()
    flagged = np.zeros(current.size, dtype=bool)
    for _ in range(int(h)):
        current, fell_back = forecast_many(model, current)
        flagged |= fell_back
    return Forecasts(current, flagged)


def forecast_h(model: FtsModel, x: float, h: int) -> tuple[float, bool]:
    result = forecast_h_many(model, [x], h)
    return float(result.values[0]), bool(result.fallback[0])


def fuzzify_single(model: FtsModel, x: float) -> np.ndarray:
    vector = membership_matrix(model.scheme, [x])[0]
    if not vector.max() > 0:
        raise DegenerateInputError(f"value {x} lies outside every fuzzy set")
    return vector


# -- serialisation ----------------------------------------------------------


def dump_model(model: FtsModel, stream: TextIO) -> None:
    """Write `model` as CSV blocks under ``[partition]``, ``[groups]``,
    ``[relation]`` and ``[representatives]`` headers."""
    fmt = "{:.17g}".format
    stream.write("[partition]\nindex,a,b\n")
    for i, (a, b) in enumerate(zip(model.scheme.lower, model.scheme.upper)):
        stream.write(f"{i},{fmt(a)},{fmt(b)}\n")
    stream.write("[groups]\nlhs,rhs\n")
    for lhs, rhs in model.groups.items():
        stream.write(f"{lhs},{' '.join(str(j) for j in rhs)}\n")
    stream.write("[relation]\n")
    for row in model.relation:
        stream.write(",".join(fmt(v) for v in row) + "\n")
    stream.write("[representatives]\n")
    for i, vec in sorted(model.representatives.items()):
        stream.write(f"{i}," + ",".join(fmt(v) for v in vec) + "\n")


def dumps_model(model: FtsModel) -> str:
    buf = io.StringIO()
    dump_model(model, buf)
    return buf.getvalue()


def load_model(stream: TextIO) -> FtsModel:
    sections: dict[str, list[str]] = {}
    current = None
    for raw in stream:
        line = raw.strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            sections[current] = []
        elif current is None:
            raise InputError(f"model file: data before any section header: {line!r}")
        else:
            sections[current].append(line)
    for name in ("partition", "groups", "relation"):
        if name not in sections:
            raise InputError(f"model file lacks a [{name}] section")

    rows = [r.split(",") for r in sections["partition"][1:]]
    bounds = [float(rows[0][1])] + [float(r[2]) for r in rows]
    scheme = PartitionScheme(np.array(bounds))

    groups = {}
    n_rel = 0
    for line in sections["groups"][1:]:
        lhs, rhs = line.split(",")
        groups[int(lhs)] = tuple(int(j) for j in rhs.split())
        n_rel += len(groups[int(lhs)])

    relation = np.array([[float(v) for v in r.split(",")] for r in sections["relation"]])
    if relation.shape != (scheme.n, scheme.n):
        raise InputError(f"relation matrix shape {relation.shape} does not match {scheme.n} sets")
    relation.setflags(write=False)

    reps = {}
    for line in sections.get("representatives", []):
        head, *rest = line.split(",")
        reps[int(head)] = np.array([float(v) for v in rest])
    return FtsModel(scheme, groups, relation, reps, n_rel)


def loads_model(text: str) -> FtsModel:
    return load_model(io.StringIO(text))
