"""Command-line entry point.

Every subcommand writes a CSV to ``--out`` (or to ``$FTSMAP_OUTPUT_DIR/<command>.csv``
when that variable is set, or to stdout otherwise) and can render an SVG with
``--svg``. Exit status: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import chaos, evaluation, fts, partition, selection
from .errors import FtsError, InputError

OUTPUT_DIR_ENV = "FTSMAP_OUTPUT_DIR"

class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _series_args(p, n_default=1000):
    g = p.add_argument_group("series")
    g.add_argument("--input", type=Path, help="read the series from a k,x CSV instead of generating it")
    g.add_argument("--r", type=float, default=3.999)
    g.add_argument("--x1", type=float, default=0.1)
    g.add_argument("--n", type=int, default=n_default, help="number of samples")
    g.add_argument("--sigma", type=float, default=0.0, help="measurement noise standard deviation")
    g.add_argument("--seed", type=int, default=0)


def _output_args(p):
    p.add_argument("--out", type=Path, help="CSV output path")
    p.add_argument("--svg", type=Path, help="optional SVG rendering")


def _split_args(p):
    p.add_argument("--total", type=int, default=1000)
    p.add_argument("--train", type=int, default=500)


def _interval_args(p, method="aic", n=None, data_universe=False):
    p.add_argument("--select", choices=("aic", "average", "fixed"), default=method)
    p.add_argument("--intervals", type=int, default=n, help="interval count for --select fixed")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=30)
    p.add_argument("--universe-min", type=float, default=0.0)
    p.add_argument("--universe-max", type=float, default=1.0)
    p.add_argument("--data-universe", action=argparse.BooleanOptionalAction, default=data_universe,
                   help="use the training data range as universe instead of the given bounds")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ftsmap", description="Fuzzy time series forecasting of the logistic map")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="logistic map trajectory")
    _series_args(p)
    _output_args(p)

    p = sub.add_parser("acf", help="autocorrelation function")
    _series_args(p, 500)
    p.add_argument("--max-lag", type=int, default=20)
    _output_args(p)

    p = sub.add_parser("bifurcation", help="bifurcation scan")
    p.add_argument("--r-min", type=float, default=2.5)
    p.add_argument("--r-max", type=float, default=4.0)
    p.add_argument("--r-steps", type=int, default=400)
    p.add_argument("--transient", type=int, default=500)
    p.add_argument("--keep", type=int, default=200)
    p.add_argument("--x1", type=float, default=0.5)
    _output_args(p)

    p = sub.add_parser("fit", help="fit a fuzzy time series model and save it")
    _series_args(p)
    p.add_argument("--train", type=int, help="fit on the first TRAIN samples only")
    _interval_args(p)
    _output_args(p)

    p = sub.add_parser("forecast", help="forecast with a saved model")
    p.add_argument("--model", type=Path, required=True)
    _series_args(p)
    p.add_argument("--h", type=int, default=1)
    _output_args(p)

    p = sub.add_parser("aic-scan", help="AIC curve over interval counts")
    _series_args(p, 100)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=30)
    p.add_argument("--universe-min", type=float, default=0.0)
    p.add_argument("--universe-max", type=float, default=1.0)
    p.add_argument("--data-universe", action="store_true")
    _output_args(p)

    p = sub.add_parser("exp-initial", help="one-step MSE across initial conditions")
    p.add_argument("--r", type=float, default=3.999)
    p.add_argument("--x1-min", type=float, default=0.1)
    p.add_argument("--x1-max", type=float, default=0.9)
    p.add_argument("--points", type=int, default=81)
    _split_args(p)
    _interval_args(p, "fixed", 9)
    _output_args(p)

    p = sub.add_parser("exp-r", help="one-step MSE across r")
    p.add_argument("--x1", type=float, default=0.1)
    p.add_argument("--r-min", type=float, default=3.0)
    p.add_argument("--r-max", type=float, default=4.0)
    p.add_argument("--points", type=int, default=101)
    _split_args(p)
    _interval_args(p)
    _output_args(p)

    p = sub.add_parser("exp-noise", help="h-step MSE under measurement noise")
    p.add_argument("--r", type=float, default=3.999)
    p.add_argument("--x1-min", type=float, default=0.1)
    p.add_argument("--x1-max", type=float, default=0.9)
    p.add_argument("--points", type=int, default=81)
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--h", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    _split_args(p)
    _interval_args(p, data_universe=True)
    _output_args(p)

    p = sub.add_parser("exp-mismatch", help="h-step MSE when the test r differs from the training r")
    p.add_argument("--r-train", type=float, default=4.0)
    p.add_argument("--r-min", type=float, default=3.5)
    p.add_argument("--r-max", type=float, default=4.0)
    p.add_argument("--points", type=int, default=51)
    p.add_argument("--x1", type=float, default=0.1)
    p.add_argument("--h", type=int, default=3)
    _split_args(p)
    _interval_args(p)
    _output_args(p)

    p = sub.add_parser("exp-intervals", help="one-step MSE across interval counts")
    p.add_argument("--r", type=float, default=3.999)
    p.add_argument("--x1", type=float, default=0.1)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=30)
    p.add_argument("--selection-samples", type=int, default=100)
    _split_args(p)
    _output_args(p)
    return parser


# -- helpers -----------------------------------------------------------------


def _load_series(args) -> chaos.TimeSeries:
    if args.input is not None:
        with open(args.input, newline="") as fh:
            series = chaos.read_series_csv(fh)
    else:
        series = chaos.generate(chaos.MapConfig(args.r, args.x1, args.n))
    if args.sigma:
        series = chaos.add_noise(series, args.sigma, args.seed)
    return series


def _universe(args) -> partition.Interval:
    return partition.Interval(args.universe_min, args.universe_max)


def _interval_choice(args) -> evaluation.IntervalChoice:
    if args.select == "fixed" and args.intervals is None:
        raise UsageError("--select fixed needs --intervals")
    return evaluation.IntervalChoice(
        args.select, args.intervals, None if args.data_universe else _universe(args), args.n_min, args.n_max
    )


def _split(args) -> evaluation.SplitSpec:
    return evaluation.SplitSpec(args.total, args.train)


def _grid(lo, hi, points):
    if points < 1:
        raise UsageError("--points must be >= 1")
    return np.linspace(lo, hi, points) if points > 1 else np.array([lo])


def _out_path(args) -> Path | None:
    if args.out is not None:
        return args.out
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return Path(env) / f"{args.command}.csv"
    return None


def _emit(args, text: str, sidecar: str | None = None) -> None:
    path = _out_path(args)
    if path is None:
        sys.stdout.write(text)
        if sidecar:
            sys.stderr.write(sidecar)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    if sidecar is not None:
        path.with_name(path.name + ".config.txt").write_text(sidecar)


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _g(x) -> str:
    return f"{x:.17g}"


# -- commands ----------------------------------------------------------------


def cmd_generate(args):
    series = _load_series(args)
    buf = io.StringIO()
    chaos.write_series_csv(series, buf)
    _emit(args, buf.getvalue())
    if args.svg:
        from .plotting import line_plot

        line_plot(args.svg, np.arange(1, len(series) + 1), {"x": series.values}, "k", "x",
                  f"logistic map, r={args.r:g}, x1={args.x1:g}")


def cmd_acf(args):
    series = _load_series(args)
    result = chaos.acf(series, args.max_lag)
    rows = [(lag, _g(c)) for lag, c in enumerate(result.correlations)]
    _emit(args, _rows_csv(["lag", "acf"], rows))
    inside = "yes" if result.within_bound() else "no"
    print(f"significance bound = +/-{result.significance_bound:.6f}; all lags within bound: {inside}", file=sys.stderr)
    if args.svg:
        from .plotting import stem_plot

        stem_plot(args.svg, np.arange(args.max_lag + 1), result.correlations, result.significance_bound)


def cmd_bifurcation(args):
    points = chaos.bifurcation_scan(args.r_min, args.r_max, args.r_steps, args.transient, args.keep, args.x1)
    _emit(args, _rows_csv(["r", "x"], [(_g(r), _g(x)) for r, x in points]))
    if args.svg:
        from .plotting import scatter_plot

        scatter_plot(args.svg, points[:, 0], points[:, 1], "r", "x", "bifurcation diagram")


def cmd_fit(args):
    series = _load_series(args)
    if args.train is not None:
        if not 2 <= args.train <= len(series):
            raise UsageError(f"--train must lie in [2, {len(series)}]")
        series = series.head(args.train)
    choice = _interval_choice(args)
    n, universe = choice.resolve(series)
    model = fts.fit(series, partition.uniform_partition(universe, n))
    _emit(args, fts.dumps_model(model))
    print(f"fitted {n} intervals, {model.n_relationships} relationships", file=sys.stderr)


def cmd_forecast(args):
    if args.h < 1:
        raise UsageError("--h must be >= 1")
    model = fts.loads_model(args.model.read_text())
    series = _load_series(args)
    values = series.values
    if values.size <= args.h:
        raise UsageError("series is shorter than the horizon")
    launches = values[: values.size - args.h]
    result = fts.forecast_h_many(model, launches, args.h)
    rows = [
        (k + 1 + args.h, _g(values[k + args.h]), _g(f), int(fb))
        for k, (f, fb) in enumerate(zip(result.values, result.fallback))
    ]
    _emit(args, _rows_csv(["k", "x", "forecast", "fallback"], rows))
    err = values[args.h :] - result.values
    print(f"h={args.h} MSE = {np.mean(err ** 2):.6g}; fallbacks = {int(result.fallback.sum())}", file=sys.stderr)
    if args.svg:
        from .plotting import line_plot

        ks = np.arange(1 + args.h, values.size + 1)
        line_plot(args.svg, ks, {"observed": values[args.h :], "forecast": result.values}, "k", "x")


def cmd_aic_scan(args):
    series = _load_series(args)
    universe = partition.universe_of(series) if args.data_universe else _universe(args)
    result = selection.select_intervals_aic(series, args.n_min, args.n_max, universe)
    buf = io.StringIO()
    result.write_csv(buf)
    _emit(args, buf.getvalue())
    print(f"selected n={result.n_star}", file=sys.stderr)
    for n in result.perfect_fit:
        print(f"warning: perfect in-sample fit at n={n}", file=sys.stderr)
    if args.svg:
        from .plotting import line_plot

        ns = [n for n, _ in result.curve]
        line_plot(args.svg, ns, {"AIC": [v for _, v in result.curve]}, "intervals", "AIC",
                  marks={f"n*={result.n_star}": result.n_star})


def _report_out(args, report: evaluation.ExperimentReport, marks=None):
    buf, cfg = io.StringIO(), io.StringIO()
    report.write_csv(buf)
    report.write_config(cfg)
    _emit(args, buf.getvalue(), cfg.getvalue())
    for model in report.models:
        _, mse = report.series_of(model)
        print(f"{model}: mean MSE over sweep = {np.nanmean(mse):.6g}", file=sys.stderr)
    if args.svg:
        from .plotting import line_plot

        series = {}
        xs = None
        for model in report.models:
            xs, mse = report.series_of(model)
            series[model] = mse
        line_plot(args.svg, xs, series, report.sweep_var, "MSE", report.name, marks)


def cmd_exp_initial(args):
    report = evaluation.sweep_initial_condition(
        args.r, _grid(args.x1_min, args.x1_max, args.points), _split(args), _interval_choice(args)
    )
    _report_out(args, report)


def cmd_exp_r(args):
    report = evaluation.sweep_r(args.x1, _grid(args.r_min, args.r_max, args.points), _split(args), _interval_choice(args))
    _report_out(args, report)


def cmd_exp_noise(args):
    report = evaluation.noise_experiment(
        args.r, _grid(args.x1_min, args.x1_max, args.points), args.sigma, args.h, args.seed,
        _split(args), _interval_choice(args),
    )
    _report_out(args, report)


def cmd_exp_mismatch(args):
    report = evaluation.mismatch_experiment(
        args.r_train, _grid(args.r_min, args.r_max, args.points), args.x1, args.h, _split(args), _interval_choice(args)
    )
    _report_out(args, report)


def cmd_exp_intervals(args):
    if args.n_min < 2 or args.n_max < args.n_min:
        raise UsageError("need 2 <= --n-min <= --n-max")
    report = evaluation.interval_count_scan(
        args.r, args.x1, range(args.n_min, args.n_max + 1), _split(args),
        selection_samples=args.selection_samples,
    )
    print(f"AIC selects n={report.config['aic_selected']}; average method selects n={report.config['average_selected']}",
          file=sys.stderr)
    _report_out(args, report, {"AIC": report.config["aic_selected"], "average": report.config["average_selected"]})


COMMANDS = {
    "generate": cmd_generate,
    "acf": cmd_acf,
    "bifurcation": cmd_bifurcation,
    "fit": cmd_fit,
    "forecast": cmd_forecast,
    "aic-scan": cmd_aic_scan,
    "exp-initial": cmd_exp_initial,
    "exp-r": cmd_exp_r,
    "exp-noise": cmd_exp_noise,
    "exp-mismatch": cmd_exp_mismatch,
    "exp-intervals": cmd_exp_intervals,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        COMMANDS[args.command](args)
    except (UsageError, InputError) as exc:
        print(f"ftsmap {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (FtsError, OSError) as exc:
        print(f"ftsmap {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
