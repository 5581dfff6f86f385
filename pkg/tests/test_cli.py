import json
import subprocess
import sys

import numpy as np
import pytest

from linear_ess.cli import main, read_samples, stats_path, write_samples
from linear_ess.oracles import TruncatedNormal1D, moments_1d


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def interval_problem(tmp_path):
    return write_json(tmp_path / "interval.json", {"A": [[1.0], [-1.0]], "b": [3.0, 1.0], "x0": [0.0]})


def test_sample_interval_moments(tmp_path, interval_problem):
    out = tmp_path / "s.csv"
    code = main(["sample", "--problem", interval_problem, "--out", str(out), "--samples", "100000",
                 "--chains", "2000", "--burn-in", "500", "--thinning", "10", "--seed", "1",
                 "--precision", "f32"])
    assert code == 0
    stats = json.loads(stats_path(out).read_text())
    for key in ("n", "chains", "burn_in", "thinning", "rejections", "seed", "precision", "wall_time"):
        assert key in stats
    assert stats["n"] == 100000 and stats["rejections"] == 0
    X = read_samples(out)
    mean, var = moments_1d(TruncatedNormal1D(-1.0, 3.0))
    assert abs(X.mean() - mean) < 0.01 and abs(X.var() - var) < 0.01


def test_zero_samples(tmp_path, interval_problem):
    out = tmp_path / "s.csv"
    assert main(["sample", "--problem", interval_problem, "--out", str(out), "--samples", "0"]) == 0
    assert out.read_text() == "x0\n"
    assert read_samples(out).shape == (0, 1)


def test_infeasible_start(tmp_path, capsys):
    prob = write_json(tmp_path / "p.json", {"A": [[1.0], [-1.0]], "b": [3.0, 1.0], "x0": [5.0]})
    assert main(["sample", "--problem", prob, "--out", str(tmp_path / "s.csv")]) == 3
    assert "constraint 0" in capsys.readouterr().err


def test_x0_flag(tmp_path):
    prob = write_json(tmp_path / "p.json", {"A": [[1.0], [-1.0]], "b": [3.0, 1.0]})
    out = str(tmp_path / "s.csv")
    assert main(["sample", "--problem", prob, "--out", out]) == 2
    assert main(["sample", "--problem", prob, "--out", out, "--x0", "0.5", "--samples", "5"]) == 0
    assert main(["sample", "--problem", prob, "--out", out, "--x0", "0.5,1"]) == 2


@pytest.mark.parametrize("content", ["{not json", json.dumps({"A": [[1.0]]}),
                                     json.dumps({"A": [[1.0]], "b": [1.0], "covariance": [[-1.0]]})])
def test_bad_problem(tmp_path, content):
    path = tmp_path / "p.json"
    path.write_text(content)
    assert main(["sample", "--problem", str(path), "--out", str(tmp_path / "s.csv"),
                 "--x0", "0"]) == 2


def test_bad_flags(tmp_path, interval_problem):
    out = str(tmp_path / "s.csv")
    assert main(["sample", "--problem", interval_problem, "--out", out, "--thinning", "0"]) == 2
    assert main(["sample", "--problem", interval_problem, "--out", out, "--trim-eps", "9"]) == 2
    assert main(["sample", "--problem", interval_problem, "--out", out, "--precision", "f16"]) == 2
    assert main(["sample", "--problem", str(tmp_path / "missing.json"), "--out", out]) == 2
    assert main([]) == 2


def test_check(tmp_path, interval_problem, capsys):
    good = tmp_path / "good.csv"
    write_samples(good, np.array([[0.0], [3.0], [-1.0]]), 1)
    assert main(["check", str(good), "--problem", interval_problem, "--tol", "0"]) == 0
    bad = tmp_path / "bad.csv"
    write_samples(bad, np.array([[0.0], [0.5], [3.5]]), 1)
    capsys.readouterr()
    assert main(["check", str(bad), "--problem", interval_problem]) == 1
    assert "row 2" in capsys.readouterr().out


def test_check_width(tmp_path, interval_problem):
    path = tmp_path / "w.csv"
    write_samples(path, np.zeros((2, 2)), 2)
    assert main(["check", str(path), "--problem", interval_problem]) == 2


def test_gen_sample_check(tmp_path):
    prob = str(tmp_path / "p.json")
    out = str(tmp_path / "s.csv")
    assert main(["gen", "--d", "64", "--seed", "7", "--out", prob]) == 0
    assert main(["sample", "--problem", prob, "--out", out, "--samples", "400", "--chains", "4",
                 "--seed", "2"]) == 0
    assert main(["check", out, "--problem", prob]) == 0


def test_gen_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["gen", "--d", "16", "--seed", "3", "--out", str(a)])
    main(["gen", "--d", "16", "--seed", "3", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_sample_reproducible_and_round_trip(tmp_path, interval_problem):
    outs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        main(["sample", "--problem", interval_problem, "--out", str(out), "--samples", "50",
              "--chains", "3", "--seed", "11"])
        outs.append(out)
    assert outs[0].read_bytes() == outs[1].read_bytes()
    X = read_samples(outs[0])
    again = tmp_path / "c.csv"
    write_samples(again, X, 1)
    assert again.read_bytes() == outs[0].read_bytes()


def test_seed_recorded(tmp_path, interval_problem):
    out = tmp_path / "s.csv"
    main(["sample", "--problem", interval_problem, "--out", str(out), "--samples", "20"])
    seed = json.loads(stats_path(out).read_text())["seed"]
    replay = tmp_path / "r.csv"
    main(["sample", "--problem", interval_problem, "--out", str(replay), "--samples", "20",
          "--seed", str(seed)])
    assert replay.read_bytes() == out.read_bytes()


def test_bench_worst_case(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bench", "--worst-case", "16", "32", "--reps", "3", "--out", str(out)]) == 0
    from linear_ess.bench import read_csv

    rows = read_csv(out)
    assert {r["method"] for r in rows} == {"fast", "brute", "likelihood"}
    assert main(["bench", "--out", str(out)]) == 2
    assert main(["bench", "--worst-case", "16", "--reps", "2", "--out", str(out)]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "linear_ess", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "sample" in proc.stdout
