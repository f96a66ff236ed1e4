# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
import csv
import json
import os
import re

import click.testing
import numpy as np
import pytest

from symmetric_toda.cli import cli

# Regular expression for matching ANSI escape sequences
RE_ESC = re.compile(r"\x1B\[[0-?]*[ -/]*[@-~]")


@pytest.fixture
def invoke():
    runner = click.testing.CliRunner(mix_stderr=False)

    def run(*args):
        return runner.invoke(cli, [str(arg) for arg in args])

    return run


def generate_tests():
    """
    Create a test for every point stored in `tests/data/leaf/`.

    Each `.json` file holds a matrix in AN and the matching `.out` file the
    expected classification. Points whose measured rank matches the
    prediction end with 'ok'; files that are not points of AN end with
    'invalid' and print nothing on stdout.
    """
    base_path = os.path.join(os.path.dirname(__file__), "data", "leaf")
    for fn in sorted(os.listdir(base_path)):
        test, _, extension = fn.rpartition(".")
        if extension != "json":
            continue
        fn = os.path.join(base_path, test)
        if fn.endswith("ok"):
            exit_code = 0
        elif fn.endswith("invalid"):
            exit_code = 2
        else:
            exit_code = 1
        with open(fn + ".out") as out:
            yield pytest.param(
                fn + ".json",
                out.read(),
                exit_code,
                id=test,
            )


@pytest.mark.parametrize(("path", "expected", "expected_exit_code"), generate_tests())
def test_leaf(invoke, path, expected, expected_exit_code):
    result = invoke("leaf", "--input", path)
    assert RE_ESC.sub("", result.stdout) == expected
    assert result.exit_code == expected_exit_code


def write_matrix(path, rows):
    path.write_text(json.dumps({"n": len(rows), "rows": rows}))
    return path


@pytest.mark.parametrize(
    "rows",
    [
        [[1.0, 0.0], [1.0, 1.0]],
        [[-1.0, 0.0], [0.0, -1.0]],
        [[2.0, 0.0], [0.0, 2.0]],
    ],
)
def test_leaf_rejects_points_outside_an(invoke, tmp_path, rows):
    result = invoke("leaf", "--input", write_matrix(tmp_path / "b.json", rows))
    assert result.exit_code == 2
    assert "Error:" in result.stderr


def test_leaf_corrupt_json(invoke, tmp_path):
    path = tmp_path / "b.json"
    path.write_text('{"n": 2, "rows": [[1.0, 0.0]')
    result = invoke("leaf", "--input", path)
    assert result.exit_code == 2
    assert "cannot read" in result.stderr


def test_leaf_size_mismatch(invoke):
    path = os.path.join(os.path.dirname(__file__), "data", "leaf", "coxeter-n3-ok.json")
    result = invoke("leaf", "--n", 2, "--input", path)
    assert result.exit_code == 2


def test_version(invoke):
    result = invoke("--version")
    assert result.exit_code == 0
    assert "version" in result.stdout


@pytest.mark.parametrize("command", ["verify", "check"])
def test_verify(invoke, tmp_path, command):
    out = tmp_path / "report.json"
    result = invoke(command, "--n", 2, "--seed", 4, "--suite", "r-identities", "--out", out)
    assert result.exit_code == 0, result.stderr
    assert "r-identities: pass" in result.stderr
    document = json.loads(out.read_text())
    assert document["pass"] is True
    assert document["n"] == 2
    assert document["seed"] == 4
    assert [suite["suite"] for suite in document["suites"]] == ["r-identities"]


def test_verify_prints_report(invoke):
    result = invoke("verify", "--n", 3, "--suite", "an-tangency", "--samples", 2)
    assert result.exit_code == 0, result.stderr
    assert json.loads(result.stdout)["suites"][0]["pass"] is True


def test_verify_failure(invoke, tmp_path):
    out = tmp_path / "report.json"
    result = invoke(
        "verify",
        "--n",
        2,
        "--suite",
        "flow-crossval",
        "--samples",
        1,
        "--tol",
        "crossval=1e-30",
        "--out",
        out,
    )
    assert result.exit_code == 1
    assert "flow-crossval: FAIL" in RE_ESC.sub("", result.stderr)
    assert json.loads(out.read_text())["pass"] is False


@pytest.mark.parametrize(
    ("args", "message"),
    [
        (["--n", 99], "n out of range"),
        (["--n", 3, "--tol", "nope=1"], "unknown tolerance"),
        (["--n", 3, "--tol", "crossval"], "name=value"),
        (["--n", 3, "--suite", "nope"], "Invalid value"),
        (["--n", 3, "--samples", 0], "Invalid value"),
    ],
)
def test_verify_rejects(invoke, args, message):
    result = invoke("verify", *args)
    assert result.exit_code == 2
    assert message in RE_ESC.sub("", result.stderr)


def test_simulate_single_point(invoke):
    result = invoke("simulate", "--n", 2, "--steps", 1, "--t1", 0)
    assert result.exit_code == 0, result.stderr
    rows = list(csv.reader(result.stdout.splitlines()))
    assert len(rows) == 2
    assert rows[0][0] == "t"
    assert float(rows[1][0]) == 0.0
    assert '"points": 1' in result.stderr


def test_simulate_writes_sidecar(invoke, tmp_path):
    path = write_matrix(tmp_path / "b0.json", [[1.0, 1.0], [0.0, 1.0]])
    out = tmp_path / "trajectory.csv"
    result = invoke(
        "simulate",
        "--input",
        path,
        "-H",
        "1:1",
        "--t1",
        1.0,
        "--steps",
        21,
        "--out",
        out,
    )
    assert result.exit_code == 0, result.stderr
    with open(out, newline="") as f:
        assert len(list(csv.reader(f))) == 22
    sidecar = json.loads(out.with_suffix(".json").read_text())
    assert sidecar["hamiltonian"] == "H1"
    assert sidecar["action_drift"] < 1e-9


@pytest.mark.parametrize(
    "args",
    [
        [],
        ["--n", 2, "-H", "5:1"],
        ["--n", 2, "--steps", 0],
        ["--n", 2, "--t0", 1, "--t1", 0],
        ["--n", 1],
    ],
)
def test_simulate_rejects(invoke, args):
    result = invoke("simulate", *args)
    assert result.exit_code == 2


def test_simulate_input_and_random_are_exclusive(invoke, tmp_path):
    path = write_matrix(tmp_path / "b0.json", [[1.0, 1.0], [0.0, 1.0]])
    result = invoke("simulate", "--input", path, "--random")
    assert result.exit_code == 2


@pytest.mark.parametrize("command", ["orbit-flow", "level-set"])
def test_orbit_flow_identity(invoke, tmp_path, command):
    out = tmp_path / "orbit.json"
    result = invoke(command, "--n", 3, "--random", "-D", "1,1,1", "--out", out)
    assert result.exit_code == 0, result.stderr
    document = json.loads(out.read_text())
    (translation,) = document["translations"]
    assert np.allclose(translation["b"]["rows"], document["b0"]["rows"], atol=1e-10)
    assert np.allclose(translation["beta"]["rows"], np.eye(3), atol=1e-10)
    assert document["report"]["pass"] is True


def test_orbit_flow_composition_note(invoke, tmp_path):
    path = write_matrix(tmp_path / "b0.json", [[1.0, 1.0], [0.0, 1.0]])
    result = invoke("orbit-flow", "--input", path, "-D", "2,0.5", "-D", "0.25,4")
    assert result.exit_code == 0, result.stderr
    document = json.loads(result.stdout)
    assert len(document["translations"]) == 2
    notes = {note["name"] for note in document["report"]["notes"]}
    assert "level-set-composition" in notes


@pytest.mark.parametrize(
    "args",
    [
        ["--n", 3, "--random", "-D", "2,1,1"],
        ["--n", 3, "--random", "-D", "1,1"],
        ["--n", 3, "--random", "-D", "1,x,1"],
        ["--n", 3, "--random"],
        ["--n", 3, "-D", "1,1,1"],
    ],
)
def test_orbit_flow_rejects(invoke, args):
    result = invoke("orbit-flow", *args)
    assert result.exit_code == 2


@pytest.mark.parametrize(
    "args",
    [
        ["simulate", "--steps", 1, "--t1", 0],
        ["orbit-flow", "-D", "2,1,0.5"],
    ],
)
def test_degenerate_point(invoke, tmp_path, args):
    identity = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    path = write_matrix(tmp_path / "b0.json", identity)
    result = invoke(*args, "--input", path)
    assert result.exit_code == 1
    assert "degenerate" in result.stderr


@pytest.mark.slow
@pytest.mark.parametrize("seed", [1, 3, 7])
@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_full_verify(invoke, tmp_path, n, seed):
    out = tmp_path / "report.json"
    result = invoke("verify", "--n", n, "--seed", seed, "--out", out)
    assert result.exit_code == 0, RE_ESC.sub("", result.stderr)
    document = json.loads(out.read_text())
    assert document["pass"] is True
    assert len(document["suites"]) == 12
