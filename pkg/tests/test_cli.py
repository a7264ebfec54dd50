import csv
import io
import json
import subprocess
import sys

import pytest

from cloneopt.cli import COMMANDS, main, parse_config


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_solve_csv(capsys):
    code, out, _ = run_cli(capsys, "solve", "--s", "0.5", "--n", "2", "--eta1", "0.5")
    assert code == 0
    (row,) = read_csv(out)
    assert float(row["q_min"]) == pytest.approx(1 / 3, abs=1e-14)
    assert row["swapped"] == "false"


def test_solve_json(capsys):
    code, out, _ = run_cli(capsys, "solve", "--s", "0.5", "--n", "2", "--eta1", "0", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["command"] == "solve"
    assert doc["params"] == {"s": 0.5, "m": 1, "n": 2, "eta1": 0.0}
    assert doc["result"]["q_min"] == pytest.approx(0.2, abs=1e-15)


def test_sweep_rows(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--s", "0.5", "--n", "5", "--points", "11")
    rows = read_csv(out)
    assert code == 0 and len(rows) == 11
    assert list(rows[0]) == ["eta1", "q_min", "q_ud"]
    assert float(rows[-1]["eta1"]) == 0.5
    assert all(float(r["q_min"]) <= float(r["q_ud"]) for r in rows)


@pytest.mark.parametrize("alpha", ["1", "0.5", "0"])
def test_curve_endpoints(capsys, alpha):
    code, out, _ = run_cli(capsys, "curve", "--s", "0.5", "--n", "3", "--alpha", alpha, "--points", "21")
    rows = read_csv(out)
    assert code == 0
    ends = {(round(float(r["q1"]), 12), round(float(r["q2"]), 12)) for r in (rows[0], rows[-1])}
    assert ends == {(1.0, 0.25), (0.25, 1.0)}


def test_ud_without_n(capsys):
    code, out, _ = run_cli(capsys, "ud", "--s", "0.5", "--eta1", "0.1")
    (row,) = read_csv(out)
    assert code == 0
    assert float(row["q_ud"]) == pytest.approx(0.325)
    assert row["regime"] == "Projective2Outcome"


def test_compare(capsys):
    code, out, _ = run_cli(capsys, "compare", "--s", "0.5", "--n", "2", "--eta1", "0.3", "--format", "json")
    res = json.loads(out)["result"]
    assert code == 0
    assert res["q_min"] < res["q_ud"] < res["dbc_total"]
    assert res["cbd_total"] == res["q_ud"]


def test_simulate_seed_env(capsys, monkeypatch):
    argv = ["simulate", "--s", "0.5", "--n", "2", "--eta1", "0.3", "--trials", "20000", "--format", "json"]
    _, first, _ = run_cli(capsys, *argv, "--seed", "5")
    monkeypatch.setenv("CLONEOPT_SEED", "5")
    _, second, _ = run_cli(capsys, *argv, "--seed", "99")
    a, b = json.loads(first), json.loads(second)
    assert b["params"]["seed"] == 5
    assert a["result"] == b["result"]
    assert a["result"]["failures"] == a["result"]["failures_1"] + a["result"]["failures_2"]


def test_transition(capsys):
    code, out, _ = run_cli(capsys, "transition", "--s", "0.5", "--n-values", "3,5")
    rows = read_csv(out)
    assert code == 0
    assert [int(r["n"]) for r in rows] == [3, 5]
    assert float(rows[0]["jump_limit"]) == pytest.approx(3.90625)


def test_output_file(capsys, tmp_path):
    target = tmp_path / "sweep.csv"
    code, out, _ = run_cli(capsys, "sweep", "--s", "0.7", "--n", "3", "--points", "5", "-o", str(target))
    assert code == 0 and out == ""
    assert len(read_csv(target.read_text(encoding="utf-8"))) == 5


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--s", "1.5", "--n", "2", "--eta1", "0.3"],
        ["solve", "--s", "0.5", "--m", "3", "--n", "2", "--eta1", "0.3"],
        ["solve", "--s", "0.5", "--n", "2", "--eta1", "1.3"],
        ["transition", "--s", "0.5", "--fd-step", "0.1"],
        ["simulate", "--s", "0.5", "--m", "2", "--n", "12", "--eta1", "0.3"],
    ],
)
def test_domain_errors_exit_2(capsys, argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 2
    assert out == ""
    assert err.startswith("cloneopt")


def test_every_command_has_a_parser():
    for cmd in COMMANDS:
        argv = [cmd, "--s", "0.5"]
        if cmd not in ("ud", "transition"):
            argv += ["--n", "3"]
        if cmd in ("solve", "ud", "compare", "simulate"):
            argv += ["--eta1", "0.2"]
        assert parse_config(argv).command == cmd


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cloneopt", "ud", "--s", "0.5", "--eta1", "0.5", "--format", "json"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert json.loads(proc.stdout)["result"]["q_ud"] == pytest.approx(0.5)
