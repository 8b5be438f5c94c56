import io
import json

import numpy as np
import pytest

from dpboot.cli import main


@pytest.fixture
def sample_file(tmp_path):
    path = tmp_path / "data.txt"
    values = np.random.default_rng(42).random(25)
    path.write_text("".join(f"{v:.17g}\n" for v in values))
    return str(path)


def _run_to_file(tmp_path, name, argv):
    out = tmp_path / name
    code = main(argv + ["--output", str(out)])
    return code, out.read_bytes()


# ---------------------------------------------------------------------------
# resample


def test_resample_single_value(tmp_path, capsys):
    path = tmp_path / "one.txt"
    path.write_text("7.0\n")
    assert main(["resample", "--input", str(path), "--method", "frequentist"]) == 0
    assert capsys.readouterr().out == "7\n"


def test_resample_is_byte_deterministic(tmp_path, sample_file):
    for method in ("frequentist", "bayesian", "dp-stickbreak", "dp-stickbreak-points", "polya-urn"):
        argv = ["resample", "--input", sample_file, "--method", method, "--seed", "9"]
        _, first = _run_to_file(tmp_path, f"{method}-1.txt", argv)
        _, second = _run_to_file(tmp_path, f"{method}-2.txt", argv)
        assert first == second


def test_resample_bayesian_weights_sum_to_one(tmp_path, sample_file, capsys):
    assert main(["resample", "--input", sample_file, "--method", "bayesian", "--seed", "3"]) == 0
    weights = [float(line) for line in capsys.readouterr().out.splitlines()]
    assert len(weights) == 25
    assert all(w > 0 for w in weights)
    assert abs(sum(weights) - 1.0) <= 1e-12


def test_resample_stick_weights_sum_to_one(tmp_path, capsys):
    # Ties split their value's mass equally across input lines.
    path = tmp_path / "tied.txt"
    path.write_text("1.0\n2.0\n2.0\n4.0\n")
    assert main(["resample", "--input", str(path), "--method", "dp-stickbreak", "--seed", "4"]) == 0
    weights = [float(line) for line in capsys.readouterr().out.splitlines()]
    assert len(weights) == 4
    assert abs(sum(weights) - 1.0) <= 1e-12
    assert weights[1] == weights[2]


def test_resample_points_stay_in_support(tmp_path, sample_file, capsys):
    values = {float(line) for line in open(sample_file) if line.strip()}
    for method in ("frequentist", "dp-stickbreak-points", "polya-urn"):
        assert main(["resample", "--input", sample_file, "--method", method, "--seed", "5"]) == 0
        out = [float(line) for line in capsys.readouterr().out.splitlines()]
        assert len(out) == 25
        assert set(out) <= values


def test_resample_reads_stdin(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO("1.0\n# comment\n\n2.0\n"))
    assert main(["resample", "--input", "-", "--method", "frequentist", "--seed", "1"]) == 0
    out = [float(line) for line in capsys.readouterr().out.splitlines()]
    assert len(out) == 2 and set(out) <= {1.0, 2.0}


def test_resample_errors(tmp_path, capsys):
    missing = str(tmp_path / "nope.txt")
    assert main(["resample", "--input", missing, "--method", "frequentist"]) == 2
    assert "nope.txt" in capsys.readouterr().err

    bad = tmp_path / "bad.txt"
    bad.write_text("1.0\npotato\n")
    assert main(["resample", "--input", str(bad), "--method", "frequentist"]) == 2
    assert "line 2" in capsys.readouterr().err

    with pytest.raises(SystemExit) as exc:
        main(["resample", "--input", str(bad), "--method", "jackknife"])
    assert exc.value.code == 2


# ---------------------------------------------------------------------------
# posterior


def test_posterior_conjugate_json(tmp_path, capsys):
    path = tmp_path / "three.txt"
    path.write_text("1.0\n2.0\n3.0\n")
    assert main(["posterior", "--input", str(path), "--alpha", "2", "--base", "normal:0,1"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["alpha_posterior"] == 5.0
    assert payload["n"] == 3
    weights = [entry["weight"] for entry in payload["mixture"]]
    components = [entry["component"] for entry in payload["mixture"]]
    assert weights == [0.4, 0.6]
    assert components == ["normal(0,1)", "empirical"]


def test_posterior_weak_limit_route(tmp_path, capsys):
    path = tmp_path / "four.txt"
    path.write_text("1\n2\n3\n4\n")
    assert main(["posterior", "--input", str(path), "--alpha", "0"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload == {
        "alpha_posterior": 4.0,
        "mixture": [{"weight": 1.0, "component": "empirical"}],
        "n": 4,
    }


def test_posterior_errors(tmp_path, capsys):
    path = tmp_path / "data.txt"
    path.write_text("1.0\n")
    assert main(["posterior", "--input", str(path), "--alpha", "2", "--base", "none"]) == 2
    assert "base" in capsys.readouterr().err

    assert main(["posterior", "--input", str(path), "--alpha", "-1"]) == 2
    capsys.readouterr()

    assert main(["posterior", "--input", str(path), "--alpha", "1", "--base", "cauchy:0,1"]) == 2
    capsys.readouterr()

    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing here\n")
    assert main(["posterior", "--input", str(empty), "--alpha", "0"]) == 2


# ---------------------------------------------------------------------------
# compare


def test_compare_csv_schema_and_determinism(tmp_path, sample_file):
    argv = [
        "compare", "--input", sample_file,
        "--method-a", "frequentist", "--method-b", "dp-stickbreak",
        "--b", "300", "--seed", "7",
    ]
    code, first = _run_to_file(tmp_path, "cmp1.csv", argv)
    assert code == 0
    _, second = _run_to_file(tmp_path, "cmp2.csv", argv)
    assert first == second

    header, row = first.decode().splitlines()
    assert header == (
        "method_a,method_b,n,b,functional,cross_ks,cross_w1,"
        "self_ks_median,self_w1_median,threshold,verdict"
    )
    cells = row.split(",")
    assert cells[0] == "frequentist" and cells[1] == "dp-stickbreak"
    assert cells[2] == "25" and cells[3] == "300" and cells[4] == "mean"
    assert 0.0 <= float(cells[5]) <= 1.0
    assert float(cells[6]) >= 0.0
    assert cells[10] in ("indistinguishable", "distinguishable")


def test_compare_parallelism_does_not_change_bytes(tmp_path, sample_file):
    base = [
        "compare", "--input", sample_file,
        "--method-a", "frequentist", "--method-b", "bayesian",
        "--b", "200", "--seed", "8",
    ]
    _, solo = _run_to_file(tmp_path, "w1.csv", base + ["--workers", "1"])
    _, pooled = _run_to_file(tmp_path, "w2.csv", base + ["--workers", "3"])
    assert solo == pooled


def test_compare_json_mirrors_csv(tmp_path, sample_file, capsys):
    argv = [
        "compare", "--input", sample_file,
        "--method-a", "frequentist", "--method-b", "frequentist",
        "--b", "200", "--seed", "9", "--format", "json",
        "--functional", "q:0.25",
    ]
    assert main(argv) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["functional"] == "q:0.25"
    assert payload["n"] == 25 and payload["b"] == 200
    assert set(payload) == {
        "method_a", "method_b", "n", "b", "functional", "cross_ks", "cross_w1",
        "self_ks_median", "self_w1_median", "threshold", "verdict",
    }


def test_compare_rejects_unknown_functional(tmp_path, sample_file, capsys):
    argv = [
        "compare", "--input", sample_file,
        "--method-a", "frequentist", "--method-b", "frequentist",
        "--b", "50", "--functional", "mode",
    ]
    assert main(argv) == 2
    assert "functional" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# experiment


def test_experiment_single_row(tmp_path, capsys):
    assert main([
        "experiment", "--n-grid", "25", "--generator", "uniform:0,1",
        "--b", "200", "--seed", "3",
    ]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2
    assert lines[0] == "n,cross_ks,cross_w1,self_ks_median,self_w1_median,verdict"
    assert lines[1].split(",")[0] == "25"


def test_experiment_grid_order_and_determinism(tmp_path):
    argv = [
        "experiment", "--n-grid", "10,25,40", "--generator", "normal:0,1",
        "--b", "150", "--seed", "4",
    ]
    code, first = _run_to_file(tmp_path, "exp1.csv", argv)
    assert code == 0
    _, second = _run_to_file(tmp_path, "exp2.csv", argv)
    assert first == second
    lines = first.decode().splitlines()
    assert len(lines) == 4
    sizes = [int(line.split(",")[0]) for line in lines[1:]]
    assert sizes == [10, 25, 40]


def test_experiment_errors(capsys):
    assert main([
        "experiment", "--n-grid", "10;20", "--generator", "uniform:0,1", "--b", "50",
    ]) == 2
    capsys.readouterr()
    assert main([
        "experiment", "--n-grid", "20,10", "--generator", "uniform:0,1", "--b", "50",
    ]) == 2
    capsys.readouterr()
    assert main([
        "experiment", "--n-grid", "10", "--generator", "lognormal:0,1", "--b", "50",
    ]) == 2
