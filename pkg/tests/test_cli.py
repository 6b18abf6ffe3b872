import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from varint.cli import fmt, run
from varint.collocation import Tableau, tableau

TABLEAU = ["tableau", "--kind", "gauss-legendre", "-s", "2", "--format", "json"]
SIMULATE = ["simulate", "--method", "sprk", "--kind", "gauss-legendre", "-s", "2",
            "--system", "pendulum", "--q", "1", "--p", "0", "--h", "0.1", "--steps", "10",
            "--format", "csv"]
CONVERGE = ["converge", "--method", "sg", "--kind", "gauss-legendre", "-s", "2",
            "--system", "harmonic-oscillator", "--q", "1", "--p", "0", "-T", "1",
            "--h-list", "0.2,0.1,0.05,0.025"]
SYMPLECTIC = ["check-symplectic", "--method", "sprk", "--kind", "gauss-legendre", "-s", "2",
              "--system", "pendulum", "--q", "1", "--p", "0", "--h", "0.1"]


def _run(argv, capsys):
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_tableau_json_nodes(capsys):
    code, out, _ = _run(TABLEAU, capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["c"] == [0.21132486540518713, 0.7886751345948129]


@pytest.mark.parametrize("kind", ["gauss-legendre", "gauss-lobatto", "radau-iia", "chebyshev"])
@pytest.mark.parametrize("s", [2, 5])
def test_tableau_json_round_trip(kind, s, capsys):
    _, out, _ = _run(["tableau", "--kind", kind, "-s", str(s)], capsys)
    back = Tableau.from_dict(json.loads(out))
    fresh = tableau(kind, s)
    for name in ("c", "b", "a", "abar", "bbar", "dmat", "alpha", "beta"):
        np.testing.assert_allclose(getattr(back, name), getattr(fresh, name), rtol=0, atol=1e-15)
    assert back.gamma == pytest.approx(fresh.gamma, abs=1e-15)


def test_tableau_csv_long_form(capsys):
    _, out, _ = _run(["tableau", "-s", "2", "--format", "csv"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["field", "i", "j", "value"]
    a = {(int(r[1]), int(r[2])): float(r[3]) for r in rows if r[0] == "a"}
    assert len(a) == 4
    assert a[(0, 1)] == tableau("gauss-legendre", 2).a[0, 1]


def test_simulate_csv(capsys):
    code, out, _ = _run(SIMULATE, capsys)
    assert code == 0
    lines = out.split("\n")
    assert lines[0] == "t,q0,p0,energy,newton_iters,residual"
    assert lines[-1] == "" and "\r" not in out
    rows = lines[1:-1]
    assert len(rows) == 11
    first = rows[0].split(",")
    assert first[:3] == ["0.0", "1.0", "0.0"]
    assert first[4:] == ["0", "0.0"]
    assert float(rows[-1].split(",")[0]) == pytest.approx(1.0)


def test_simulate_output_is_byte_stable(capsys):
    _, a, _ = _run(SIMULATE, capsys)
    _, b, _ = _run(SIMULATE, capsys)
    assert a == b


def test_simulate_vector_columns(capsys):
    _, out, _ = _run(["simulate", "--system", "kepler", "--q", "1,0", "--p", "0,1",
                      "--h", "0.05", "--steps", "3"], capsys)
    assert out.splitlines()[0] == "t,q0,q1,p0,p1,energy,newton_iters,residual"
    assert len(out.splitlines()) == 5


def test_simulate_json(capsys):
    _, out, _ = _run(SIMULATE[:-1] + ["json"], capsys)
    doc = json.loads(out)
    assert len(doc["rows"]) == 11
    assert doc["rows"][0]["q"] == [1.0]


def test_converge_csv_slope(capsys):
    code, out, _ = _run(CONVERGE, capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "h,error"
    assert len(lines) == 6
    assert lines[-1].startswith("# slope=")
    assert float(lines[-1].split("=")[1]) == pytest.approx(2.0, abs=0.3)


def test_converge_json(capsys):
    _, out, _ = _run(CONVERGE + ["--format", "json"], capsys)
    doc = json.loads(out)
    assert doc["h_values"] == [0.2, 0.1, 0.05, 0.025]
    assert doc["slope"] == pytest.approx(2.0, abs=0.3)


def test_check_symplectic_json(capsys):
    code, out, _ = _run(SYMPLECTIC, capsys)
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"defect", "fd_step", "h"}
    assert doc["defect"] <= 1e-6 and doc["fd_step"] == 1e-5 and doc["h"] == 0.1


def test_output_file(tmp_path, capsys):
    path = tmp_path / "traj.csv"
    code, out, _ = _run(SIMULATE + ["--output", str(path)], capsys)
    assert code == 0 and out == ""
    assert path.read_bytes().count(b"\n") == 12


@pytest.mark.parametrize("argv,flag", [
    (["tableau", "-s", "11"], "-s"),
    (["tableau", "--kind", "gauss-lobatto", "-s", "1"], "-s"),
    (["tableau", "--kind", "hermite"], "--kind"),
    (["simulate", "--method", "sg", "-s", "1", "--system", "pendulum", "--q", "1", "--p", "0",
      "--h", "0.1", "--steps", "3"], "-s"),
    (["simulate", "--system", "kepler", "--q", "1", "--p", "0,1", "--h", "0.1", "--steps", "3"],
     "--q"),
    (["simulate", "--system", "pendulum", "--q", "1", "--p", "0", "--h", "-0.1", "--steps", "3"],
     "--h"),
    (["simulate", "--system", "pendulum", "--q", "1", "--p", "0", "--h", "0.1"], "--steps"),
    (["converge", "--system", "pendulum", "--q", "1", "--p", "0", "-T", "1",
      "--h-list", "0.1,0.2,0.05"], "--h-list"),
    (["converge", "--system", "pendulum", "--q", "1", "--p", "0", "-T", "1",
      "--h-list", "0.3,0.2,0.1"], "--h-list"),
    (["simulate", "--system", "harmonic-oscillator", "--params", "1,2,3", "--q", "1", "--p", "0",
      "--h", "0.1", "--steps", "3"], "--params"),
    (["simulate", "--system", "pendulum", "--q", "x", "--p", "0", "--h", "0.1", "--steps", "3"],
     "--q"),
])
def test_usage_errors_exit_two(argv, flag, capsys):
    with pytest.raises(SystemExit) as info:
        run(argv)
    assert info.value.code == 2
    err = capsys.readouterr().err
    assert flag in err


def test_sprk_single_stage_simulate_is_valid(capsys):
    code, out, _ = _run(SIMULATE[:6] + ["1"] + SIMULATE[7:], capsys)
    assert code == 0 and len(out.splitlines()) == 12


def test_solver_failure_exit_one_with_partial_output(capsys):
    code, out, err = _run(SIMULATE + ["--tol", "1e-300", "--max-iter", "3"], capsys)
    assert code == 1
    assert out.splitlines()[0] == "t,q0,p0,energy,newton_iters,residual"
    # rows cover the initial state and every step completed before the failure
    failed_at = int(err.split("failed at step ")[1].split()[0])
    assert len(out.splitlines()) == failed_at + 2
    assert "iterations" in err


def test_numbers_round_trip():
    for x in (0.1, 1 / 3, 2.0**-1074, 1e300, -0.0):
        assert float(fmt(x)) == x


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "varint"] + TABLEAU, capture_output=True,
                          text=True, check=True)
    assert json.loads(proc.stdout)["s"] == 2
