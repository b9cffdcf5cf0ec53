"""Tests for the command-line front end."""

import numpy as np
import pytest

from ramplab.cli import EXIT_ESTIMATION, EXIT_INPUT, EXIT_OK, main


@pytest.fixture
def csv_path(tmp_path):
    rng = np.random.default_rng(2)
    n = 400
    x1 = rng.normal(size=n)
    x2 = (rng.random(n) < 0.5).astype(int)
    y = (0.1 + 0.2 * x1 - 0.3 * x2 + rng.uniform(-0.5, 0.5, n) > 0).astype(int)
    lines = ["y,x1,x2"] + [f"{a},{b:.6f},{c}" for a, b, c in zip(y, x1, x2)]
    lines[5] = "1,,0"
    path = tmp_path / "data.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def separated_csv(tmp_path):
    x = np.linspace(-1.0, 1.0, 40)
    lines = ["y,x"] + [f"{int(v > 0)},{v:.6f}" for v in x]
    path = tmp_path / "separated.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_fit_markdown(csv_path, capsys):
    code = main(["fit", "--data", str(csv_path), "--y", "y", "--x", "x1,x2"])
    out = capsys.readouterr().out

    assert code == EXIT_OK
    assert "Outcome: y, N = 399 (1 incomplete rows dropped)" in out
    assert "Ramp NLS" in out
    assert "APE x2 robust SE" in out


def test_fit_csv_to_file(csv_path, tmp_path):
    out = tmp_path / "fit.csv"
    code = main(
        [
            "fit", "--data", str(csv_path), "--y", "y", "--x", "x1,x2",
            "--interact", "x1:x2", "--estimators", "ols,logit",
            "--format", "csv", "--out", str(out),
        ]
    )

    assert code == EXIT_OK
    text = out.read_text(encoding="utf-8")
    assert text.startswith("estimator,term,statistic,value")
    assert "logit,x1:x2,coef," in text


def test_fit_missing_column(csv_path, capsys):
    code = main(["fit", "--data", str(csv_path), "--y", "y", "--x", "x1,nope"])

    assert code == EXIT_INPUT
    assert "nope" in capsys.readouterr().err


def test_fit_with_failed_estimator(separated_csv, capsys):
    code = main(["fit", "--data", str(separated_csv), "--y", "y", "--x", "x", "--estimators", "ols,probit"])

    assert code == EXIT_ESTIMATION
    # the OLS column is still written
    assert "OLS/LPM" in capsys.readouterr().out


def test_fit_bootstrap_needs_two(csv_path):
    assert main(["fit", "--data", str(csv_path), "--y", "y", "--x", "x1", "--bootstrap", "1"]) == EXIT_INPUT


def test_unknown_table(capsys):
    assert main(["table", "99"]) == EXIT_INPUT
    assert "99" in capsys.readouterr().err


def test_table_csv(capsys):
    code = main(["table", "3", "--seed", "1", "--reps", "3", "--n", "200", "--format", "csv"])
    out = capsys.readouterr().out

    assert code == EXIT_OK
    assert "3,truth,ape1_mean,0.1000" in out


def test_simulate(capsys):
    code = main(
        [
            "simulate", "--design", "asym", "--error", "uniform:1", "--beta", "0.1,0.2,-0.3",
            "--reps", "2", "--n", "200", "--seed", "3",
        ]
    )
    out = capsys.readouterr().out

    assert code == EXIT_OK
    assert out.startswith("No interaction, x1 lognormal, x2 asym. binary, u ~ U(-1, 1)")
    assert "N = 200, replications = 2, seed = 3" in out


def test_simulate_non_positive_a():
    code = main(
        ["simulate", "--design", "sym", "--error", "uniform:0", "--beta", "0.1,0.2,-0.3", "--reps", "2"]
    )
    assert code == EXIT_INPUT


def test_simulate_beta_count():
    code = main(
        [
            "simulate", "--design", "sym", "--error", "normal", "--beta", "0.1,0.2,-0.3",
            "--interaction", "--reps", "2",
        ]
    )
    assert code == EXIT_INPUT


def test_bad_error_law():
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--design", "sym", "--error", "cauchy", "--beta", "0.1,0.2,-0.3"])
    assert info.value.code == 2
