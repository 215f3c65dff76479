import json
import subprocess
import sys

import pytest

from steklov.cli import main


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return p


@pytest.fixture
def disk(tmp_path):
    return write(tmp_path, "disk.json", {"kind": "Disk", "n": 1})


@pytest.fixture
def star(tmp_path):
    return write(tmp_path, "star.json", {"kind": "StarPlanar", "n": 1, "radial_coeffs": [[3, 0.1, 0.0]]})


def test_spectrum_json_and_csv(tmp_path, disk):
    out = tmp_path / "o"
    assert main(["spectrum", "--domain", str(disk), "--out", str(out), "--count", "9"]) == 0
    doc = json.loads((out / "spectrum.json").read_text())
    assert doc["eigenvalues"] == [0.0, 1.0, 2.0, 3.0, 4.0]
    assert doc["multiplicities"] == [1, 2, 2, 2, 2]
    assert main(["spectrum", "--domain", str(disk), "--out", str(out), "--format", "csv", "--count", "9"]) == 0
    assert (out / "spectrum.csv").read_text().splitlines()[2] == "index,eigenvalue,multiplicity"


def test_star_spectrum_matches_frozen(tmp_path, star, frozen):
    out = tmp_path / "o"
    assert main(["spectrum", "--domain", str(star), "--out", str(out), "--count", "12"]) == 0
    doc = json.loads((out / "spectrum.json").read_text())
    ev = [v for v, m in zip(doc["eigenvalues"], doc["multiplicities"]) for _ in range(m)]
    assert ev == pytest.approx(frozen["mfs_star_3"]["eigenvalues"][:12], abs=2e-6)


def test_hear_and_invariants(tmp_path):
    ball = write(tmp_path, "ball.json", {"kind": "Ball", "n": 2})
    out = tmp_path / "o"
    assert main(["hear", "--domain", str(ball), "--out", str(out)]) == 0
    doc = json.loads((out / "hear.json").read_text())
    assert doc["recovered"]["boundary_volume"] == pytest.approx(12.566370614359172, rel=1e-7)
    assert main(["invariants", "--domain", str(ball), "--out", str(out)]) == 0
    inv = json.loads((out / "invariants.json").read_text())
    assert inv["integrals"]["a2"] == pytest.approx(1 / 3)
    assert (out / "invariants_densities.csv").exists()


def test_trace_output(tmp_path, disk):
    out = tmp_path / "o"
    assert main(["trace", "--domain", str(disk), "--out", str(out), "--format", "csv", "--tmin", "0.01", "--tmax", "1"]) == 0
    assert len((out / "trace.csv").read_text().splitlines()) > 10


def test_outputs_are_deterministic(tmp_path, disk):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["hear", "--domain", str(disk), "--out", str(d)]) == 0
    assert (a / "hear.json").read_bytes() == (b / "hear.json").read_bytes()


def test_cache_and_env_override(tmp_path, star, monkeypatch):
    flag, env = tmp_path / "flag", tmp_path / "env"
    args = ["spectrum", "--domain", str(star), "--out", str(tmp_path / "o"), "--count", "8", "--cache", str(flag)]
    assert main(args) == 0
    first = (tmp_path / "o" / "spectrum.json").read_bytes()
    assert len(list(flag.glob("spectrum-*.csv"))) == 1
    assert main(args) == 0
    assert (tmp_path / "o" / "spectrum.json").read_bytes() == first
    monkeypatch.setenv("STEKLOV_CACHE", str(env))
    assert main(args) == 0
    assert len(list(env.glob("spectrum-*.csv"))) == 1


def test_config_errors_exit_2(tmp_path, capsys):
    bad = write(tmp_path, "bad.json", '{\n  "kind": Disk\n}')
    assert main(["spectrum", "--domain", str(bad), "--out", str(tmp_path)]) == 2
    assert "line 2" in capsys.readouterr().err
    extra = write(tmp_path, "extra.json", {"kind": "Disk", "n": 1, "colour": "red"})
    assert main(["spectrum", "--domain", str(extra), "--out", str(tmp_path)]) == 2
    assert main(["spectrum", "--out", str(tmp_path)]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["spectrum", "--domain", str(tmp_path / "missing.json")]) == 2


def test_numerical_failure_exits_3(tmp_path, disk):
    # a 101-level spectrum cannot support t = 1e-3: the tail is refused
    assert main(["trace", "--domain", str(disk), "--out", str(tmp_path), "--count", "101", "--tmin", "1e-3", "--tmax", "1"]) == 3


def test_console_entry_point(tmp_path, disk):
    r = subprocess.run([sys.executable, "-m", "steklov.cli", "spectrum", "--domain", str(disk), "--out", str(tmp_path), "--count", "3"], capture_output=True, text=True)
    assert r.returncode == 0 and "3 eigenvalues" in r.stdout
