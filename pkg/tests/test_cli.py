import json
import logging
import subprocess
import sys

import pytest

from quatlift.cli import main
from quatlift.config import RunConfig


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "N,want",
    [("2", "h=1 mass=1/12"), ("11", "h=2 mass=5/6"), ("37", "h=3 mass=3")],
)
def test_classes(N, want, capsys):
    code, out, _ = run(["classes", "--N", N], capsys)
    assert code == 0 and want in out


def test_classes_explicit_ramification(capsys):
    code, out, _ = run(["classes", "--N", "6", "--ramified", "2"], capsys)
    assert code == 0 and "h=1 mass=1/3" in out
    code, _, err = run(["classes", "--N", "6"], capsys)
    assert code == 2 and "ScopeError" in err


def test_eigen_level_11(capsys):
    code, out, _ = run(["eigen", "--N", "11"], capsys)
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert code == 0 and len(lines) == 1
    assert "a2=-2" in lines[0] and "# 11a1" in lines[0]


def test_eigen_level_37(capsys):
    code, out, _ = run(["eigen", "--N", "37"], capsys)
    assert code == 0
    assert any("a2=-2 a3=-3" in l and "# 37a1" in l for l in out.splitlines())


def test_eigen_higher_weight_empty(capsys):
    code, out, _ = run(["eigen", "--N", "2", "--k", "1"], capsys)
    assert code == 0
    assert "rational_systems=0" in out
    assert [l for l in out.splitlines() if not l.startswith("#")] == []


def test_lift_deterministic_and_cached(tmp_path, capsys, caplog):
    args = ["lift", "--N", "11", "--l", "1", "--D-bound", "150", "--cache-dir", str(tmp_path / "c"), "--workers", "1"]
    code, first, _ = run(args + ["-o", str(tmp_path / "a.tsv")], capsys)
    assert code == 0
    caplog.set_level(logging.INFO, logger="quatlift")
    code, _, _ = run(args + ["-o", str(tmp_path / "b.tsv")], capsys)
    assert code == 0
    assert any("cache hit" in r.getMessage() for r in caplog.records)
    a, b = (tmp_path / "a.tsv").read_bytes(), (tmp_path / "b.tsv").read_bytes()
    assert a == b and b"# l = 1" in a
    code, _, _ = run(args[:-4] + ["--no-cache", "-o", str(tmp_path / "c.tsv")], capsys)
    assert (tmp_path / "c.tsv").read_bytes() == a


def test_corrupted_cache_is_recomputed(tmp_path, capsys, caplog):
    cache = tmp_path / "c"
    args = ["lift", "--N", "11", "--D-bound", "80", "--cache-dir", str(cache), "--workers", "1"]
    code, good, _ = run(args, capsys)
    (entry,) = cache.rglob("*.json")
    data = json.loads(entry.read_text())
    data["payload"] = data["payload"].replace("\t1\n", "\t2\n", 1) + "x"
    entry.write_text(json.dumps(data))
    caplog.set_level(logging.WARNING, logger="quatlift")
    code, again, _ = run(args, capsys)
    assert code == 0 and again == good
    assert any("corrupted" in r.getMessage() for r in caplog.records)
    # the recomputed entry is valid again
    caplog.clear()
    caplog.set_level(logging.INFO, logger="quatlift")
    run(args, capsys)
    assert any("cache hit" in r.getMessage() for r in caplog.records)


def test_verify_baseline(tmp_path, capsys):
    out = tmp_path / "r.tsv"
    code, _, err = run(["verify", "--N", "11", "--l", "1", "--D-bound", "60", "--no-cache", "-o", str(out), "--workers", "1"], capsys)
    assert code == 0, err
    assert "status: PASS" in err
    rep = json.loads(out.with_suffix(".json").read_text())
    assert rep["status"] == "PASS" and rep["constancy"] < 1e-6


@pytest.mark.parametrize(
    "argv,name",
    [
        (["verify", "--N", "11", "--l", "-3", "--skew"], "ParityViolation"),
        (["lift", "--N", "37", "--l", "1"], "ParityViolation"),
        (["lift", "--N", "11", "--l", "-7"], "SignViolation"),
        (["lift", "--N", "11", "--l", "33"], "ConductorClash"),
    ],
)
def test_hypothesis_violations(argv, name, capsys):
    code, _, err = run(argv + ["--no-cache"], capsys)
    assert code == 2
    assert name in err


def test_skew_mode_warns_but_exits_zero(tmp_path, capsys):
    code, _, err = run(["verify", "--N", "11", "--l", "-7", "--skew", "--D-bound", "60", "--no-cache", "--workers", "1"], capsys)
    assert code == 0
    assert "status: WARN" in err


def test_verify_failure_exit_code(capsys):
    # a deliberately wrong expected eigenvalue selects no eigenform
    code, _, err = run(["lift", "--N", "11", "--ap", "2:5", "--no-cache"], capsys)
    assert code == 3 and "NotEigen" in err


def test_precision_failure_exit_code(capsys):
    code, _, err = run(["verify", "--N", "11", "--D-bound", "40", "--precision", "1e-300", "--no-cache", "--workers", "1"], capsys)
    assert code == 4


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# baseline\nN = 37\nl = 5\neps_g = 37:+1\nD_bound = 40\nprecision = 1e-8\nskew = false\n")
    parsed = RunConfig.from_file(cfg)
    assert parsed.N == 37 and parsed.eps_g == {37: 1} and str(parsed.l) == "5"
    back = RunConfig.from_text(parsed.to_text())
    assert back == parsed
    code, out, _ = run(["lift", "--config", str(cfg), "--no-cache", "--workers", "1"], capsys)
    assert code == 0 and "# l = 5" in out
    # flags override the file
    code, out, _ = run(["lift", "--config", str(cfg), "--D-bound", "20", "--no-cache", "--workers", "1"], capsys)
    assert "# bound = 20" in out


def test_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("N = eleven\n")
    code, _, err = run(["classes", "--config", str(cfg)], capsys)
    assert code == 1 and "bad configuration" in err


def test_weights_dump(capsys):
    code, out, _ = run(["weights", "--N", "37", "--l", "5"], capsys)
    assert code == 0
    assert "# p=5" in out and "violations=0" in out
    rows = [l for l in out.splitlines() if not l.startswith("#")]
    assert len(rows) == 5 * 5 - 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "quatlift", "classes", "--N", "3"], capture_output=True, text=True)
    assert res.returncode == 0 and "h=1 mass=1/6" in res.stdout
