"""Black-box runs of the command line through a subprocess."""

import json
import subprocess
import sys

import pytest


def run(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "bpe_atlas", *args], capture_output=True,
                          text=True, cwd=cwd, timeout=300)


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


SMALL = {"operator": {"family": "classical", "weights": "ones", "depth": 200},
         "scan": {"N": 64, "radii": [0.5, 0.9, 1.1], "rays": 8},
         "radii": {"N": 128, "sphere_samples": 4}}


def test_scan_outputs(tmp_path):
    out = tmp_path / "out"
    r = run("scan", "--config", write(tmp_path, SMALL), "--out", str(out))
    assert r.returncode == 0, r.stderr
    lines = (out / "scan.csv").read_text().splitlines()
    assert lines[0] == "re,im,abs,B_N,slope,class" and len(lines) == 25
    assert (out / "scan.pgm").read_bytes().startswith(b"P5 3 8 255\n")
    rep = json.loads((out / "report.json").read_text())
    assert set(rep) >= {"operator", "radii", "horizons", "seed", "table"}
    assert set(rep["radii"]) >= {"r_inner", "r_disc", "r_dual"}
    first = (out / "scan.csv").read_bytes()
    r = run("scan", "--config", write(tmp_path, SMALL), "--out", str(out))
    assert (out / "scan.csv").read_bytes() == first


def test_scan_flags_override(tmp_path):
    out = tmp_path / "o"
    r = run("scan", "--config", write(tmp_path, SMALL), "--out", str(out), "--nmax", "48",
            "--seed", "7", "--threshold", "0.01")
    assert r.returncode == 0, r.stderr
    rep = json.loads((out / "report.json").read_text())
    assert rep["horizons"]["scan_N"] == 48 and rep["seed"] == 7


def test_config_errors_exit_1(tmp_path):
    assert run("scan", "--config", write(tmp_path, "{not json")).returncode == 1
    bad = {"operator": {"family": "example1", "depth": 100}, "scan": {"N": 2048}}
    r = run("scan", "--config", write(tmp_path, bad))
    assert r.returncode == 1 and "depth >= N + 2" in r.stderr
    empty = dict(SMALL, scan={"N": 64, "radii": []})
    assert run("scan", "--config", write(tmp_path, empty)).returncode == 1
    assert run("scan", "--config", str(tmp_path / "missing.json")).returncode == 1
    assert run("nonsense").returncode == 1


def test_compute_error_exit_2(tmp_path):
    # weights decaying to zero: T*T is not invertible over the declared tail
    doc = {"operator": {"family": "classical", "weights": [1.0] * 50, "depth": 100,
                        "tail_bounds": [0.0, 1.0]},
           "scan": {"N": 40}, "radii": {"N": 40}}
    r = run("radii", "--config", write(tmp_path, doc), "--out", str(tmp_path / "o"))
    assert r.returncode == 2, r.stderr


def test_strict_inconclusive_exit_2(tmp_path):
    doc = dict(SMALL, scan={"N": 64, "radii": [1.0], "rays": 2})
    out = str(tmp_path / "o")
    # at |w| = 1 the slope of log2 B_n is about 0.01: between threshold/4 and threshold
    args = ("scan", "--config", write(tmp_path, doc), "--out", out, "--threshold", "0.03")
    r = run(*args)
    assert r.returncode == 0 and "INCONCLUSIVE 2" in r.stdout
    assert run(*args, "--strict").returncode == 2


def test_describe_radii_kernel(tmp_path):
    out = tmp_path / "o"
    cfg = write(tmp_path, dict(SMALL, kernel={"z": [0.5, 0.0], "w": [0.5, 0.0]}))
    r = run("describe", "--config", cfg, "--out", str(out))
    assert r.returncode == 0 and json.loads(r.stdout)["describe"]["dim_ker_T_star"] == 1
    assert run("radii", "--config", cfg, "--out", str(out)).returncode == 0
    assert json.loads((out / "radii.json").read_text())["radii"]["r_inner"] == pytest.approx(1.0)
    assert run("kernel", "--config", cfg, "--out", str(out)).returncode == 0
    k = json.loads((out / "kernel.json").read_text())["kernel"]
    assert k["kappa_re"][0][0] == pytest.approx(1 / 0.75, abs=1e-12)


def test_verify_commands(tmp_path):
    out = tmp_path / "o"
    r = run("verify-example1", "--out", str(out))
    assert r.returncode == 0 and "FAIL" not in r.stdout
    t1 = (out / "verify-example1.json").read_text()
    run("verify-example1", "--out", str(out))
    assert (out / "verify-example1.json").read_text() == t1
    r = run("verify-example2", "--out", str(out))
    assert r.returncode == 0 and "dim ker T*" in r.stdout
    assert run("verify-example2", "--out", str(out), "--strict").returncode == 2
