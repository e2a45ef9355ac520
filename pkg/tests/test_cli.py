import json
import subprocess
import sys

import pytest

from mlnlimits import models
from mlnlimits.cli import EXIT_ERROR, EXIT_FAIL, EXIT_OK, EXIT_UNMIXED, main
from mlnlimits.experiments import REGISTRY


@pytest.fixture
def two_point(tmp_path):
    path = tmp_path / "two_point.json"
    models.two_point().dump(path)
    return str(path)


@pytest.fixture
def triangle(tmp_path):
    path = tmp_path / "triangle.json"
    models.triangle(1).dump(path)
    return str(path)


def test_parse(capsys):
    assert main(["parse", "forall x2 (~R(x1,x2))", "--signature", "graph"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["free_vars"] == ["x1"] and not out["quantifier_free"]


def test_parse_error_exit_code(capsys):
    assert main(["parse", "R(x1", "--signature", "unary"]) == EXIT_ERROR
    assert "error" in capsys.readouterr().err


def test_missing_model_is_a_usage_error(capsys):
    assert main(["normalform"]) == EXIT_ERROR
    assert main(["normalform", "--model", "/nonexistent.json"]) == EXIT_ERROR


def test_normalform(two_point, capsys):
    assert main(["--model", two_point, "normalform"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == {"nu": 2, "table": [[1, 1], [1, 0, 1]]}


def test_global_flags_after_subcommand(two_point, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["exact-dist", "-n", "2", "--model", two_point, "--out", str(out)]) == EXIT_OK
    text = (out / "profile.csv").read_text()
    assert text == capsys.readouterr().out
    rows = [r.split(",") for r in text.splitlines()[1:]]
    assert [float(r[2]) for r in rows] == pytest.approx([0.4, 0.2, 0.4])


def test_world_distribution_for_graphs(triangle, capsys):
    assert main(["--model", triangle, "exact-dist", "-n", "3"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "world,log2_weight,prob" and len(lines) == 9
    assert sum(float(l.split(",")[2]) for l in lines[1:]) == pytest.approx(1.0)


def test_predict_limit(two_point, capsys):
    assert main(["--model", two_point, "predict-limit"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["points"] == [0.0, 1.0]


def test_event_prob_exact_int(tmp_path, capsys):
    path = tmp_path / "empty.json"
    models.empty(models.UNARY).dump(path)
    assert main(["--model", str(path), "--exact-int", "event-prob", "-n", "3",
                 "--event", "exists x1 (R(x1))"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["exact"] == "7/8" and out["value"] == 0.875


def test_tv(tmp_path, capsys):
    p, q = tmp_path / "p.csv", tmp_path / "q.csv"
    p.write_text("m,prob\n0,0.5\n1,0.5\n")
    q.write_text("m,prob\n0,1\n1,0\n")
    assert main(["tv", str(p), str(q)]) == EXIT_OK
    assert float(capsys.readouterr().out) == 0.5
    q.write_text("m,prob\n0,1\n")
    assert main(["tv", str(p), str(q)]) == EXIT_ERROR


def test_sample_event_and_log(triangle, tmp_path, capsys):
    log = tmp_path / "log.csv"
    args = ["--model", triangle, "--seed", "3", "sample", "-n", "5", "--event",
            "exists x1 (exists x2 (R(x1,x2)))", "--samples", "20", "--log", str(log)]
    assert main(args) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["status"] == "ok" and 0 <= out["mean"] <= 1
    first = log.read_bytes()
    assert first.startswith(b"chain,step,statistic,value\n")
    main(args)
    assert log.read_bytes() == first


def test_sample_not_mixed_exit_code(two_point, capsys):
    code = main(["--model", two_point, "sample", "-n", "30", "--statistic", "m",
                 "--samples", "20"])
    assert code == EXIT_UNMIXED
    captured = capsys.readouterr()
    assert "not mixed" in captured.err
    out = json.loads(captured.out)
    assert out["status"] == "not-mixed" and "mean" not in out
    assert set(out["per_start"]) == {"empty", "complete"}


def test_sample_unknown_statistic(triangle, capsys):
    assert main(["--model", triangle, "sample", "-n", "5", "--statistic", "colours"]) == EXIT_ERROR


def test_experiment_list(capsys):
    assert main(["experiment", "list"]) == EXIT_OK
    assert len(capsys.readouterr().out.splitlines()) == 9
    assert main(["experiment", "list", "--json"]) == EXIT_OK
    items = json.loads(capsys.readouterr().out)
    assert len(items) == 9 and [i["name"] for i in items] == list(REGISTRY)
    assert all({"name", "theorem", "summary"} <= set(i) for i in items)


def test_experiment_unknown_name(capsys):
    assert main(["experiment", "run", "no-such-thing"]) == EXIT_ERROR
    err = capsys.readouterr().err
    assert all(name in err for name in REGISTRY)


def test_experiment_bad_param(capsys):
    assert main(["experiment", "run", "two-point", "--param", "n"]) == EXIT_ERROR


def test_experiment_run_writes_identical_csv(tmp_path, capsys):
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        code = main(["--seed", "5", "experiment", "run", "two-point", "--mode", "exact",
                     "--out", str(out)])
        assert code == EXIT_OK
        outs.append((out / "two-point.csv").read_bytes())
        report = json.loads((out / "two-point.json").read_text())
        assert report["name"] == "two-point"
    assert outs[0] == outs[1]
    assert b"\r" not in outs[0]
    assert "criterion 3: pass" in capsys.readouterr().out


def test_experiment_failure_exit_code(capsys):
    # w = 0 is flat, so the trend check cannot pass
    code = main(["experiment", "run", "triangle", "--mode", "exact",
                 "--param", "weights=[0,0]", "--param", "n=4"])
    assert code == EXIT_FAIL
    assert "[fail]" in capsys.readouterr().out


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "mlnlimits", "experiment", "list"],
                         capture_output=True, text=True, check=True)
    assert "two-point" in out.stdout
