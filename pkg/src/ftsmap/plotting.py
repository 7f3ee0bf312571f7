"""Best-effort SVG renderings of the CSV outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def line_plot(path, xs, series: dict, xlabel: str, ylabel: str, title: str = "", marks: dict | None = None):
    """One line per entry of `series`; `marks` draws labelled vertical lines."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, ys in series.items():
        ax.plot(xs, ys, label=label)
    for label, x in (marks or {}).items():
        ax.axvline(x, linestyle="--", color="grey")
        ax.annotate(label, (x, ax.get_ylim()[1]), rotation=90, va="top", ha="right", fontsize=8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend()
    _save(fig, path)


def stem_plot(path, lags, values, bound: float, title: str = ""):
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.stem(lags, values)
    ax.axhline(bound, linestyle="--", color="red")
    ax.axhline(-bound, linestyle="--", color="red")
    ax.set_xlabel("lag")
    ax.set_ylabel("autocorrelation")
    if title:
        ax.set_title(title)
    _save(fig, path)


def scatter_plot(path, xs, ys, xlabel: str, ylabel: str, title: str = ""):
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.scatter(xs, ys, s=0.1, color="black", marker=",")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    _save(fig, path)
