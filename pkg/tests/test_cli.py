"""Command-line interface: subcommands, exit codes, env overrides, reports."""
import json
import os
import subprocess
import sys

import pytest

from cstarenv.cli import main
from cstarenv.corpus import write_corpus


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("corpus")
    write_corpus(d, seed=1, count=4)
    return d


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_full_matrix_algebra(corpus_dir, capsys, tmp_path):
    out_file = tmp_path / "report.json"
    code, out, _ = run(
        capsys, "analyze", str(corpus_dir / "full_M2.json"), "--json-out", str(out_file)
    )
    assert code == 0
    assert "full_M2: ambient 2, system dim 4, algebra dim 4" in out
    assert "silov killed: dk [] lattice [] (agree)" in out
    assert "propagation 1" in out
    report = json.loads(out_file.read_text())
    assert report["kind"] == "analysis"
    assert report["silov_killed"] == {"dk": [], "lattice": [], "agreement": True}
    assert report["propagation"]["value"] == 1


def test_analyze_state_sum(corpus_dir, capsys):
    code, out, _ = run(capsys, "analyze", str(corpus_dir / "state_sum.json"))
    assert code == 0
    assert "silov killed: dk [2] lattice [2] (agree)" in out
    assert "envelope blocks: (2,1)" in out
    assert "propagation 2 chain (3, 4)" in out


def test_analyze_jordan(corpus_dir, capsys):
    code, out, _ = run(capsys, "analyze", str(corpus_dir / "jordan_M2.json"))
    assert code == 0
    assert "silov killed: dk [] lattice [] (agree)" in out
    assert "propagation 2" in out


def test_quiet_suppresses_stdout(corpus_dir, capsys):
    code, out, err = run(capsys, "analyze", str(corpus_dir / "full_M1.json"), "--quiet")
    assert code == 0
    assert out == ""


def test_flags_are_echoed_into_the_report(corpus_dir, capsys, tmp_path):
    out_file = tmp_path / "r.json"
    code, _, _ = run(
        capsys,
        "analyze",
        str(corpus_dir / "full_M1.json"),
        "--seed",
        "3",
        "--tol-sep",
        "2e-06",
        "--uniqueness-trials",
        "16",
        "--json-out",
        str(out_file),
        "--quiet",
    )
    assert code == 0
    report = json.loads(out_file.read_text())
    assert report["seed"] == 3
    assert report["tolerances"]["tol_sep"] == 2e-06
    assert report["flags"]["uniqueness_trials"] == 16


def test_input_errors_exit_one(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", str(tmp_path / "missing.json"))
    assert code == 1
    assert "error:" in err and "cannot read" in err

    bad = tmp_path / "bad.json"
    bad.write_text('{"schema": "v1",\n broken\n}')
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 1
    assert "invalid JSON at line 2" in err

    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"schema": "v1", "name": "x", "generators": []}))
    code, _, err = run(capsys, "analyze", str(wrong))
    assert code == 1
    assert "missing field 'ambient_dim'" in err
    assert "wrong.json" in err


def test_bad_arguments_exit_one(capsys):
    code, _, err = run(capsys, "analyze")
    assert code == 1 and "error:" in err
    code, _, err = run(capsys)
    assert code == 1
    code, _, err = run(capsys, "analyze", "x.json", "--seed", "-1")
    assert code == 1 and "--seed must be non-negative" in err


def test_tensor_pair_passes_all_checks(corpus_dir, capsys, tmp_path):
    out_file = tmp_path / "pair.json"
    code, out, _ = run(
        capsys,
        "tensor",
        str(corpus_dir / "state_sum.json"),
        str(corpus_dir / "jordan_M2.json"),
        "--json-out",
        str(out_file),
    )
    assert code == 0
    assert "state_sum (x) jordan_M2:" in out
    assert "killed pairs [[2, 1]]" in out
    assert out.count("PASS") == 4 and "FAIL" not in out
    report = json.loads(out_file.read_text())
    assert report["kind"] == "tensor" and report["passed"] is True


def test_corpus_subcommand(capsys, tmp_path):
    target = tmp_path / "written"
    code, out, _ = run(capsys, "corpus", str(target), "--count", "4")
    assert code == 0
    assert "wrote 4 systems" in out
    names = sorted(p.name for p in target.iterdir())
    assert "manifest.json" in names and len(names) == 5


def test_verify_all_small_corpus(corpus_dir, capsys, tmp_path):
    out_dir = tmp_path / "reports"
    code, out, err = run(
        capsys, "verify-all", str(corpus_dir), "--json-out", str(out_dir)
    )
    assert code == 0
    for name in ("full_M1", "full_M2", "jordan_M2", "state_sum"):
        assert name in out
    assert out.count("ok") == 4 + 8  # four systems, eight pairs
    assert "skipped" not in out and "FAIL" not in out
    summary = json.loads((out_dir / "summary.json").read_text())
    assert summary["kind"] == "summary"
    assert len(summary["systems"]) == 4 and len(summary["pairs"]) == 8
    assert summary["failures"] == {
        "input": 0,
        "failed": 0,
        "skipped": 0,
        "inconclusive": 0,
    }
    written = sorted(p.name for p in out_dir.iterdir())
    assert written.count("summary.json") == 1
    assert sum(n.endswith(".analysis.json") for n in written) == 4
    assert sum(n.endswith(".tensor.json") for n in written) == 8


def test_verify_all_without_manifest(capsys, tmp_path):
    code, _, err = run(capsys, "verify-all", str(tmp_path))
    assert code == 1
    assert "missing manifest.json" in err


def test_verify_all_with_a_corrupted_member(capsys, tmp_path):
    write_corpus(tmp_path, seed=1, count=4)
    (tmp_path / "full_M2.json").write_text("{broken")
    code, out, _ = run(capsys, "verify-all", str(tmp_path))
    assert code == 1
    assert "full_M2" in out and "input" in out
    assert "invalid JSON" in out
    # pairs over the broken member are skipped, the rest still verify
    assert "skipped" in out


def test_tolerance_env_variable(corpus_dir, capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("CSTARENV_TOLERANCES", "tol_sep=1e-05, tol_norm=2e-06")
    out_file = tmp_path / "r.json"
    code, _, _ = run(
        capsys,
        "analyze",
        str(corpus_dir / "full_M1.json"),
        "--json-out",
        str(out_file),
        "--quiet",
    )
    assert code == 0
    report = json.loads(out_file.read_text())
    assert report["tolerances"]["tol_sep"] == 1e-05
    assert report["tolerances"]["tol_norm"] == 2e-06

    # explicit flags beat the environment
    code, _, _ = run(
        capsys,
        "analyze",
        str(corpus_dir / "full_M1.json"),
        "--tol-sep",
        "3e-05",
        "--json-out",
        str(out_file),
        "--quiet",
    )
    assert code == 0
    report = json.loads(out_file.read_text())
    assert report["tolerances"]["tol_sep"] == 3e-05
    assert report["tolerances"]["tol_norm"] == 2e-06

    monkeypatch.setenv("CSTARENV_TOLERANCES", "tol_bogus=1")
    code, _, err = run(capsys, "analyze", str(corpus_dir / "full_M1.json"))
    assert code == 1
    assert "CSTARENV_TOLERANCES" in err

    monkeypatch.setenv("CSTARENV_TOLERANCES", "tol_sep=abc")
    code, _, err = run(capsys, "analyze", str(corpus_dir / "full_M1.json"))
    assert code == 1
    assert "not a number" in err


def test_console_script_entry_point(corpus_dir):
    proc = subprocess.run(
        [sys.executable, "-m", "cstarenv.cli", "analyze", str(corpus_dir / "full_M1.json")],
        capture_output=True,
        text=True,
        env={**os.environ, "CSTARENV_TOLERANCES": ""},
    )
    assert proc.returncode == 0
    assert "full_M1" in proc.stdout
