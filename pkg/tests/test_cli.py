import json
import os
import subprocess
import sys

import numpy as np
import pytest

from lcu import io
from lcu.cli import build_parser, main
from lcu.graph import choose_labeled, gen_class_network, gen_two_gaussians


@pytest.fixture
def path_files(tmp_path):
    (tmp_path / "p.edges").write_text("0 1\n1 2\n")
    (tmp_path / "p.csv").write_text("vertex,label\n0,1\n2,2\n")
    return str(tmp_path / "p.edges"), str(tmp_path / "p.csv")


def files(d):
    return {name: open(os.path.join(d, name), "rb").read() for name in sorted(os.listdir(d))}


def test_classify_path(tmp_path, path_files, capsys):
    edges, labels = path_files
    out = tmp_path / "out"
    assert main(["classify", "--edges", edges, "--labels", labels, "--lambda", "1", "--tau", "10",
                 "--out", str(out)]) == 0
    pred = io.read_predictions(str(out / "predictions.csv"))
    assert pred.labels.tolist() == [1, 1, 2]
    report = io.read_report(str(out / "report.json"))
    assert report["predictions"]["overlapping_vertices"] == [0, 1, 2]
    assert report["params"]["lam"] == 1.0 and report["params"]["tau"] == 10
    assert report["timings"] is None
    assert sorted(os.listdir(out)) == ["domination.txt", "predictions.csv", "report.json",
                                       "unfolding_1.edges", "unfolding_2.edges",
                                       "unfolding_unassigned.edges"]
    assert (out / "unfolding_1.edges").read_text() == "0 1\n"
    assert "classified 1 unlabeled" in capsys.readouterr().out


def test_classify_missing_class(tmp_path, path_files, capsys):
    edges, _ = path_files
    (tmp_path / "one.csv").write_text("0,1\n")
    code = main(["classify", "--edges", edges, "--labels", str(tmp_path / "one.csv"), "--classes", "2",
                 "--out", str(tmp_path / "o")])
    assert code == 1
    assert "class(es) 2" in capsys.readouterr().err


def test_classify_disconnected(tmp_path, capsys):
    (tmp_path / "d.edges").write_text("0 1\n2 3\n")
    (tmp_path / "d.csv").write_text("0,1\n3,2\n")
    code = main(["classify", "--edges", str(tmp_path / "d.edges"), "--labels", str(tmp_path / "d.csv"),
                 "--out", str(tmp_path / "o")])
    assert code == 2
    assert "increase k" in capsys.readouterr().err


def test_classify_parse_error(tmp_path, path_files, capsys):
    _, labels = path_files
    (tmp_path / "bad.edges").write_text("0 1\n1 1\n")
    assert main(["classify", "--edges", str(tmp_path / "bad.edges"), "--labels", labels,
                 "--out", str(tmp_path / "o")]) == 1
    assert ":2:" in capsys.readouterr().err


def test_classify_two_gaussians_auto_k(tmp_path):
    # 1% labels is three points per dataset, so accuracy is averaged over several draws
    acc = []
    for seed in range(5):
        data = gen_two_gaussians(150, separation=5.0, seed=seed)
        y = data.labels.copy()
        data.labels[:] = choose_labeled(y, 0.01, seed=seed)
        io.write_points(data, tmp_path / f"pts{seed}.csv")
        out = tmp_path / f"o{seed}"
        assert main(["classify", "--points", str(tmp_path / f"pts{seed}.csv"), "--label-column",
                     "--auto-k", "--out", str(out)]) == 0
        pred = io.read_predictions(str(out / "predictions.csv"))
        free = data.labels == 0
        acc.append(np.mean(pred.labels[free] == y[free]))
        assert io.read_report(str(out / "report.json"))["params"]["k"] >= 1
    assert np.mean(acc) >= 0.9


def test_classify_init_file(tmp_path, path_files):
    edges, labels = path_files
    (tmp_path / "init.csv").write_text("1,0\n0,0\n0,1\n")
    out = tmp_path / "o"
    assert main(["classify", "--edges", edges, "--labels", labels, "--init", "file",
                 "--init-file", str(tmp_path / "init.csv"), "--tau", "1", "--out", str(out)]) == 0
    assert (out / "domination.txt").read_text().splitlines()[1:] == ["1 0 1 0.5", "2 2 1 0.5"]


def test_classify_deterministic_with_threads(tmp_path, path_files, monkeypatch):
    y = np.repeat([1, 2], 40)
    g = gen_class_network(y, 3, 0.05, seed=4)
    io.write_edge_list(g, tmp_path / "g.edges")
    io.write_labels(choose_labeled(y, 0.1, seed=4), tmp_path / "g.csv")
    argv = ["classify", "--edges", str(tmp_path / "g.edges"), "--labels", str(tmp_path / "g.csv"),
            "--tau", "50", "--out"]
    assert main(argv + [str(tmp_path / "a")]) == 0
    assert main(argv + [str(tmp_path / "b")]) == 0
    monkeypatch.setenv("LCU_THREADS", "2")
    assert main(argv + [str(tmp_path / "c")]) == 0
    a = files(tmp_path / "a")
    assert a == files(tmp_path / "b") == files(tmp_path / "c")


def test_simulate_compare(tmp_path, capsys):
    out = tmp_path / "s"
    assert main(["simulate", "--generate", "200", "--particles", "100000", "--runs", "10", "--tau", "200",
                 "--compare", "--out", str(out)]) == 0
    line = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("correlation")][0]
    assert float(line.split()[1]) > 0.9
    report = json.loads((out / "report.json").read_text())
    assert report["correlation"] > 0.9 and report["params"]["particles"] == 100000


def test_simulate_reproducible(tmp_path):
    argv = ["simulate", "--generate", "40", "--particles", "500", "--runs", "1", "--tau", "20",
            "--seed", "3", "--out"]
    assert main(argv + [str(tmp_path / "a")]) == 0
    assert main(argv + [str(tmp_path / "b")]) == 0
    assert files(tmp_path / "a") == files(tmp_path / "b")


def test_simulate_zero_particles(tmp_path):
    assert main(["simulate", "--generate", "20", "--particles", "0", "--out", str(tmp_path)]) == 1


def test_experiment_unknown_suite(tmp_path, capsys):
    assert main(["experiment", "nope", "--out", str(tmp_path)]) == 1
    assert "unknown suite" in capsys.readouterr().err


def test_experiment_scale(tmp_path):
    assert main(["experiment", "scale", "--networks", "2", "--tau", "10", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "scale.json").read_text())
    assert rep["summary"]["max_relative_deviation"] < 1e-9
    assert (tmp_path / "scale_deviation.csv").read_text().startswith("x,y,sigma\n0.5,")


def test_experiment_equivalence_csv(tmp_path):
    assert main(["experiment", "equivalence", "--networks", "1", "--runs", "2", "--tau", "20",
                 "--out", str(tmp_path)]) == 0
    for lam in ("0.0", "0.5", "1.0"):
        rows = (tmp_path / f"correlation_lambda_{lam}.csv").read_text().splitlines()
        assert rows[0] == "x,y,sigma" and len(rows) == 5


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as info:
        main(["classify", "--lambda"])
    assert info.value.code == 1


def test_help_lists_flags():
    text = build_parser()._subparsers._group_actions[0].choices["classify"].format_help()
    for flag in ("--lambda", "--tau", "--k", "--auto-k", "--init", "--seed", "--stochastic", "--particles",
                 "--runs", "--out", "(default: 1.0)", "(default: 1000)"):
        assert flag in text
    sim = build_parser()._subparsers._group_actions[0].choices["simulate"].format_help()
    assert "--compare" in sim


def test_module_entry_point(tmp_path, path_files):
    edges, labels = path_files
    res = subprocess.run([sys.executable, "-m", "lcu", "classify", "--edges", edges, "--labels", labels,
                          "--tau", "1", "--out", str(tmp_path / "m")], capture_output=True, text=True)
    assert res.returncode == 0
    assert "tau=1 is below the network diameter 2" in res.stderr
