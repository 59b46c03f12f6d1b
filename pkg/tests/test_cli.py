from __future__ import annotations

import math
import subprocess
import sys

import numpy as np
import pytest

from distorder.cli import main
from distorder.oracles import mittag_leffler

HARMONIC = """\
[phi1]
kind = atomic
atoms = 1:0

[phi2]
kind = atomic
atoms = 1:0

[forcing]
kind = zero

[initial]
y0 = 1
v0 = 0

[run]
horizon = 1
n_steps = 400
tol = 1e-8
ball_radius = 2
"""


def write(tmp_path, text, name="p.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_csv(path):
    rows, meta = [], {}
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        for line in fh:
            if line.startswith("# "):
                key, _, value = line[2:].rstrip("\n").partition("=")
                meta.setdefault(key, value)
            else:
                rows.append([float(v) for v in line.split(",")])
    return header, np.array(rows), meta


def test_solve_harmonic(tmp_path):
    out = tmp_path / "y.csv"
    assert main(["solve", write(tmp_path, HARMONIC), "--out", str(out)]) == 0
    header, data, meta = read_csv(out)
    assert header == ["t", "y", "z", "z_ode_residual"]
    assert data.shape == (401, 4)
    assert np.max(np.abs(data[:, 1] - np.cos(data[:, 0]))) <= 1e-3
    assert meta["converged"] == "true" and meta["certified"] == "true"
    assert "class_mild" in meta


def test_solve_deterministic_bytes(tmp_path):
    p = write(tmp_path, HARMONIC)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["solve", p, "--out", str(a)]) == 0
    assert main(["solve", p, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_floats_round_trip(tmp_path):
    out = tmp_path / "y.csv"
    main(["solve", write(tmp_path, HARMONIC), "--out", str(out), "--grid-n", "16"])
    for line in out.read_text().splitlines()[1:]:
        if line.startswith("#"):
            continue
        for cell in line.split(","):
            assert repr(float(cell)) == cell


def test_solve_not_converged_exit_2(tmp_path):
    out = tmp_path / "y.csv"
    code = main(["solve", write(tmp_path, HARMONIC), "--out", str(out), "--max-iter", "1", "--tol", "1e-14"])
    assert code == 2
    assert read_csv(out)[2]["converged"] == "false"


def test_flag_overrides(tmp_path):
    out = tmp_path / "y.csv"
    main(["solve", write(tmp_path, HARMONIC), "--out", str(out), "--grid-n", "50", "--horizon", "0.5", "--damping", "0.9"])
    _, data, _ = read_csv(out)
    assert data.shape[0] == 51 and data[-1, 0] == 0.5


def test_check_exit_codes(tmp_path):
    p = write(tmp_path, HARMONIC.replace("[phi2]\nkind = atomic\natoms = 1:0", "[phi2]\nkind = atomic\natoms = 1:1, -1:0"))
    out = tmp_path / "c.txt"
    assert main(["check", p, "--out", str(out)]) == 3
    lines = dict(line.split(",", 1) for line in out.read_text().splitlines())
    assert lines["winding_count"] == "1" and lines["verdict"] == "not_admissible"

    p = write(tmp_path, HARMONIC.replace("atoms = 1:0\n\n[forcing]", "atoms = 1:2, 1:0\n\n[forcing]"))
    assert main(["check", p, "--out", str(out)]) == 4
    lines = dict(line.split(",", 1) for line in out.read_text().splitlines())
    ordinates = sorted(round(float(item.split(":")[0]), 6) for item in lines["axis_zeros"].split())
    assert lines["verdict"] == "boundary_degenerate" and ordinates == [-1.0, 1.0]
    assert main(["check", write(tmp_path, HARMONIC), "--out", str(out)]) == 0


def test_check_continuous(tmp_path):
    text = HARMONIC.replace("[phi2]\nkind = atomic\natoms = 1:0", "[phi2]\nkind = exponential\nbase = 1.2")
    assert main(["check", write(tmp_path, text), "--out", str(tmp_path / "c.txt")]) == 0
    text = HARMONIC.replace(
        "[phi2]\nkind = atomic\natoms = 1:0", "[phi2]\nkind = continuous\ndensity = uniform\nsupport = 0, 0.5"
    )
    assert main(["check", write(tmp_path, text), "--out", str(tmp_path / "c.txt")]) == 3


def test_solve_inadmissible_exit_3(tmp_path):
    p = write(tmp_path, HARMONIC.replace("[phi2]\nkind = atomic\natoms = 1:0", "[phi2]\nkind = atomic\natoms = 1:1, -1:0"))
    assert main(["solve", p, "--out", str(tmp_path / "y.csv")]) == 3


def test_kernel_mittag_leffler(tmp_path):
    text = HARMONIC.replace("[phi2]\nkind = atomic\natoms = 1:0", "[phi2]\nkind = atomic\natoms = 1:0.5, 1:0")
    out = tmp_path / "k.csv"
    assert main(["kernel", write(tmp_path, text), "--out", str(out), "--horizon", "2", "--grid-n", "200"]) == 0
    header, data, meta = read_csv(out)
    assert header == ["t", "l", "cumulative"] and meta["regularity"] == "L1loc"
    mask = data[:, 0] >= 0.05
    ref = np.array([t**-0.5 * mittag_leffler(0.5, 0.5, -math.sqrt(t)) for t in data[mask, 0]])
    assert np.max(np.abs(data[mask, 1] - ref)) <= 1e-4


def test_oracle_compare(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["oracle-compare", write(tmp_path, HARMONIC), "--out", str(out), "--horizon", "0.5"]) == 0
    header, data, meta = read_csv(out)
    assert header == ["t", "y_solver", "y_oracle", "abs_diff"]
    assert float(meta["sup_diff"]) <= 5e-3 and meta["agree"] == "true"
    code = main(["oracle-compare", write(tmp_path, HARMONIC), "--out", str(out), "--agree-tol", "1e-12"])
    assert code == 2


def test_oracle_compare_unsupported_exit_2(tmp_path):
    text = HARMONIC.replace("[phi2]\nkind = atomic\natoms = 1:0", "[phi2]\nkind = exponential\nbase = 1.2")
    text = text.replace("[phi1]\nkind = atomic\natoms = 1:0", "[phi1]\nkind = exponential\nbase = 2")
    text = text.replace("y0 = 1", "y0 = 0")
    assert main(["oracle-compare", write(tmp_path, text), "--out", str(tmp_path / "o.csv"), "--horizon", "0.2"]) == 2


def test_usage_errors(tmp_path, capsys):
    assert main(["frobnicate"]) == 1
    assert main(["solve"]) == 1
    assert main(["solve", str(tmp_path / "missing.ini")]) == 1
    assert main(["solve", write(tmp_path, HARMONIC.replace("y0 = 1", "y0 = x"))]) == 1
    err = capsys.readouterr().err
    assert "initial.y0" in err
    assert main(["solve", write(tmp_path, HARMONIC), "--grid-n", "2"]) == 1
    assert main(["solve", write(tmp_path, HARMONIC), "--damping", "0"]) == 1


def test_stdout_default(tmp_path, capsys):
    assert main(["kernel", write(tmp_path, HARMONIC), "--grid-n", "4"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("t,l,cumulative\n") and "# regularity=algebraic" in out


def test_console_script_module(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "distorder", "check", write(tmp_path, HARMONIC)], capture_output=True, text=True
    )
    assert proc.returncode == 0 and "verdict,admissible" in proc.stdout
