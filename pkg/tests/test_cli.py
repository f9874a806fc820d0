import io
import subprocess
import sys

import numpy as np
import pytest

from z4mat.cli import run
from z4mat.fileio import read_matrix, write_matrix
from z4mat.matrix import identity, mul_naive, random_matrix
from z4mat.recurrence import RecurrenceSpec
from z4mat.sequence import companion


def call(*argv):
    out = io.StringIO()
    code = run([str(a) for a in argv], out)
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path, rng):
    a, b = random_matrix(23, rng=rng), random_matrix(23, rng=rng)
    write_matrix(tmp_path / "a.z4t", a)
    write_matrix(tmp_path / "b.z4b", b)
    write_matrix(tmp_path / "i.z4t", identity(5))
    return tmp_path, a, b


def test_mul_identity(files):
    d, _, _ = files
    assert call("mul", d / "i.z4t", d / "i.z4t", "-o", d / "c.z4t") == (0, "")
    assert (d / "c.z4t").read_bytes() == (d / "i.z4t").read_bytes()


@pytest.mark.parametrize("algo", ["naive", "blocked", "strassen"])
def test_mul_algorithms_agree(files, algo):
    d, a, b = files
    code, _ = call("mul", d / "a.z4t", d / "b.z4b", "-o", d / f"{algo}.z4b", "--algo", algo,
                   "--threshold", 4, "--n", 5, "--block", 3)
    assert code == 0
    assert read_matrix(d / f"{algo}.z4b") == mul_naive(a, b)


def test_text_and_binary_inputs_agree(files):
    d, a, _ = files
    write_matrix(d / "a.z4b", a)
    call("mul", d / "a.z4t", d / "a.z4t", "-o", d / "x.z4t")
    call("mul", d / "a.z4b", d / "a.z4b", "-o", d / "y.z4t")
    assert (d / "x.z4t").read_bytes() == (d / "y.z4t").read_bytes()


def test_pow_uniform_exponent(tmp_path):
    m = companion(RecurrenceSpec((3, 1, 0, 1)))
    write_matrix(tmp_path / "m.z4t", m)
    assert call("pow", tmp_path / "m.z4t", "--exp-uniform-test", 4, "-o", tmp_path / "p.z4t")[0] == 0
    expected = identity(4)
    for _ in range(30):
        expected = mul_naive(expected, m)
    assert read_matrix(tmp_path / "p.z4t") == expected
    assert call("pow", tmp_path / "m.z4t", "--exp", 12, "-o", tmp_path / "q.z4t")[0] == 0
    assert read_matrix(tmp_path / "q.z4t") == identity(4)


def test_pow_requires_one_exponent(tmp_path):
    write_matrix(tmp_path / "m.z4t", identity(2))
    assert call("pow", tmp_path / "m.z4t", "-o", tmp_path / "p.z4t")[0] == 2
    assert call("pow", tmp_path / "m.z4t", "-o", tmp_path / "p.z4t", "--exp", 1,
                "--exp-uniform-test", 2)[0] == 2


def test_find_uniform(tmp_path):
    code, text = call("find-uniform", "--coeffs", "1,1,0,1", "--s", 2,
                      "--emit-matrix", tmp_path / "m.z4t")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "exponent 30"
    assert lines[-1] == "survivors=3 unique=false"
    assert "1,3,0,1" in lines[4] and lines[4].split()[-2:] == ["true", "false"]
    assert read_matrix(tmp_path / "m.z4t") == companion(RecurrenceSpec((1, 1, 0, 1)))


def test_find_uniform_warns_on_stderr(capsys):
    code, _ = call("find-uniform", "--coeffs", "1,0,1")
    assert code == 0
    assert "not admissible" in capsys.readouterr().err


def test_check_poly():
    code, text = call("check-poly", "--coeffs", "1,1,0,1")
    assert code == 0
    fields = dict(line.split(None, 1) for line in text.splitlines())
    assert fields["admissible"] == "true"
    assert fields["remainder"] == "0"
    assert "order" in fields and "maximal" in fields
    code, text = call("check-poly", "--coeffs", "1,0,1")
    assert code == 0 and "admissible  false" in text


def test_gen():
    assert call("gen", "--coeffs", "1,1", "--s", 2, "--init", "0,1", "--count", 6) == (
        0, "1\n2\n3\n1\n0\n1\n")


def test_schedule(tmp_path):
    code, text = call("schedule", "--n", 28, "--depth", 32, "--k", 896, "--z", 10, "--delta", 140)
    assert code == 0
    fields = dict(line.split() for line in text.splitlines())
    assert fields["Gamma"] == "64800" and fields["Phi_improved"] == "44100"
    assert fields["feasible"] == "true"
    trace = tmp_path / "trace.txt"
    code, text = call("schedule", "--n", 28, "--depth", 32, "--k", 896, "--z", 10,
                      "--delta", 140, "--trace", trace)
    assert code == 0 and "simulated_cycles" in text
    lines = trace.read_text().splitlines()
    assert len(lines) == 225 and lines[0].startswith("step=0 compute=288 memory=196")


def test_schedule_errors():
    args = ["schedule", "--n", 28, "--depth", 32, "--k", 896, "--z", 7, "--delta", 140]
    code, text = call(*args)
    assert code == 0 and "feasible                   false" in text
    assert call(*args, "--simulate")[0] == 1


def test_selftest():
    code, text = call("selftest", "--width", 28, "--rounds", 1000)
    assert code == 0 and text.split()[-1] == "0"
    code, text = call("selftest", "--width", 28, "--rounds", 1000, "--inject-fault")
    assert code == 1 and int(text.split()[-1]) > 0
    assert call("selftest", "--width", 28, "--rounds", 5)[0] == 1


def test_exit_codes(tmp_path, capsys):
    write_matrix(tmp_path / "a.z4t", identity(3))
    write_matrix(tmp_path / "b.z4t", identity(4))
    (tmp_path / "bad.z4t").write_bytes(b"z4m 1 2\n05\n")
    (tmp_path / "bad.z4b").write_bytes(b"XXXX" + bytes(8))
    assert call("mul", tmp_path / "a.z4t", tmp_path / "b.z4t", "-o", tmp_path / "c.z4t")[0] == 1
    capsys.readouterr()
    assert call("mul", tmp_path / "bad.z4t", tmp_path / "a.z4t", "-o", tmp_path / "c.z4t")[0] == 2
    err = capsys.readouterr().err
    assert "line 2 (byte 9)" in err and err.count("\n") == 1
    assert call("pow", tmp_path / "bad.z4b", "--exp", 2, "-o", tmp_path / "c.z4t")[0] == 2
    assert "byte 0" in capsys.readouterr().err
    assert call("pow", tmp_path / "missing.z4t", "--exp", 2, "-o", tmp_path / "c.z4t")[0] == 2
    assert call("mul", "--bogus")[0] == 2
    assert call()[0] == 2
    assert call("gen", "--coeffs", "1,x", "--init", "0,1", "--count", 3)[0] == 2
    assert call("gen", "--coeffs", "1,1", "--init", "0", "--count", 3)[0] == 1
    assert call("check-poly", "--coeffs", "1,5")[0] == 1
    assert call("find-uniform", "--coeffs", "1")[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "z4mat", "gen", "--coeffs", "1,1", "--init", "0,1",
                           "--count", "3"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "1\n2\n3\n"
    proc = subprocess.run([sys.executable, "-m", "z4mat", "selftest", "--width", "3", "--rounds",
                           "20", "--inject-fault"], capture_output=True, text=True)
    assert proc.returncode == 1 and proc.stdout.split()[-1] == "5"
