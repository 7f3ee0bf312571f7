import numpy as np
import pytest

from ftsmap.cli import OUTPUT_DIR_ENV, run


@pytest.fixture(autouse=True)
def _no_env_dir(monkeypatch):
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)


def read_rows(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


def test_generate_to_stdout(capsys):
    assert run(["generate", "--r", "3.999", "--x1", "0.1", "--n", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "k,x"
    values = [float(line.split(",")[1]) for line in lines[1:]]
    assert values[:2] == [0.1, 3.999 * 0.1 * 0.9]
    assert values[2] == pytest.approx(0.921268792808, abs=1e-12)


def test_generate_domain_error(tmp_path, capsys):
    out = tmp_path / "x.csv"
    assert run(["generate", "--r", "5", "--out", str(out)]) == 1
    assert not out.exists()
    assert "r must lie" in capsys.readouterr().err


def test_unknown_flag_exit_code(capsys):
    assert run(["generate", "--nope"]) == 1
    assert "usage" in capsys.readouterr().err


def test_missing_subcommand_exit_code():
    assert run([]) == 1


def test_runtime_error_exit_code(tmp_path):
    assert run(["forecast", "--model", str(tmp_path / "missing.txt")]) == 2


def test_aic_scan(tmp_path, capsys):
    out = tmp_path / "aic.csv"
    assert run(["aic-scan", "--r", "3.999", "--x1", "0.1", "--n", "100", "--out", str(out)]) == 0
    header, rows = read_rows(out)
    assert header == ["n", "aic"]
    assert [int(r[0]) for r in rows] == list(range(2, 31))
    err = capsys.readouterr().err
    selected = int(err.split("selected n=")[1].split()[0])
    assert 5 <= selected <= 9


def test_fit_then_forecast(tmp_path):
    model = tmp_path / "model.txt"
    assert run(["fit", "--n", "500", "--select", "fixed", "--intervals", "7", "--out", str(model)]) == 0
    text = model.read_text()
    assert text.startswith("[partition]") and "[relation]" in text
    series = tmp_path / "series.csv"
    assert run(["generate", "--x1", "0.2", "--n", "50", "--out", str(series)]) == 0
    before = series.read_bytes()
    out = tmp_path / "fc.csv"
    assert run(["forecast", "--model", str(model), "--input", str(series), "--h", "2", "--out", str(out)]) == 0
    header, rows = read_rows(out)
    assert header == ["k", "x", "forecast", "fallback"]
    assert len(rows) == 48 and rows[0][0] == "3"
    assert series.read_bytes() == before


def test_fit_fixed_needs_intervals():
    assert run(["fit", "--select", "fixed"]) == 1


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
    assert run(["generate", "--n", "5"]) == 0
    assert (tmp_path / "generate.csv").exists()


def test_experiment_report_and_idempotence(tmp_path):
    args = ["exp-initial", "--points", "2", "--total", "400", "--train", "200"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(args + ["--out", str(a)]) == 0
    assert run(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    header, rows = read_rows(a)
    assert header == ["sweep_var", "sweep_value", "model", "mse", "variance", "n_intervals", "fallbacks", "theta"]
    assert len(rows) == 6
    config = (tmp_path / "a.csv.config.txt").read_text()
    assert "experiment = initial-condition" in config and "train = 200" in config


@pytest.mark.parametrize(
    "command",
    [
        ["exp-r", "--points", "2", "--r-min", "3.5", "--total", "300", "--train", "150", "--n-max", "10"],
        ["exp-noise", "--points", "1", "--total", "300", "--train", "150", "--n-max", "10"],
        ["exp-mismatch", "--points", "2", "--total", "300", "--train", "150", "--n-max", "10"],
        ["exp-intervals", "--n-min", "3", "--n-max", "5", "--total", "300", "--train", "150"],
    ],
)
def test_experiment_commands(tmp_path, command):
    out = tmp_path / "r.csv"
    assert run(command + ["--out", str(out)]) == 0
    header, rows = read_rows(out)
    assert header[0] == "sweep_var" and rows
    assert all(np.isfinite(float(r[3])) for r in rows)


def test_acf_and_bifurcation(tmp_path, capsys):
    out = tmp_path / "acf.csv"
    assert run(["acf", "--x1", "0.2", "--n", "500", "--out", str(out)]) == 0
    header, rows = read_rows(out)
    assert header == ["lag", "acf"] and len(rows) == 21 and float(rows[0][1]) == 1.0
    assert "within bound: yes" in capsys.readouterr().err
    out = tmp_path / "bif.csv"
    assert run(["bifurcation", "--r-steps", "5", "--keep", "10", "--transient", "50", "--out", str(out)]) == 0
    header, rows = read_rows(out)
    assert header == ["r", "x"] and len(rows) == 50


def test_svg_output(tmp_path):
    svg = tmp_path / "g.svg"
    assert run(["generate", "--n", "50", "--out", str(tmp_path / "g.csv"), "--svg", str(svg)]) == 0
    assert svg.read_text().lstrip().startswith("<?xml")
