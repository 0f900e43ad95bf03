import csv
import io
import json

import pytest
from click.testing import CliRunner

from qtheta.cli import main
from qtheta.corpus import PACKAGE_CORPUS


@pytest.fixture
def run():
    runner = CliRunner()
    return lambda *args: runner.invoke(main, list(args))


def test_coeffs(run):
    assert run("coeffs", "--expr", "phi(q)", "--order", "10").stdout == "1 2 0 0 2 0 0 0 0 2\n"
    assert run("coeffs", "--expr", "1", "--order", "3").stdout == "1 0 0\n"
    out = run("coeffs", "--expr", "8*psi(q^2)*psi(q^3)^2", "--order", "8").stdout.split()
    assert out[6] == "16"


def test_coeffs_parse_error(run):
    result = run("coeffs", "--expr", "phi(q", "--order", "3")
    assert result.exit_code == 2
    assert "line 1, column 6" in result.stderr


def test_count(run):
    assert run("count", "--kind", "N", "--form", "1,3,3", "--n", "1").stdout == "2\n"
    assert run("count", "--kind", "t", "--form", "9,9,9", "--n", "0").stdout == "8\n"
    assert run("count", "--kind", "T", "--form", "2,3,3", "--n", "6", "--via", "series").stdout == "2\n"


def test_count_engine_mismatch(run, monkeypatch):
    monkeypatch.setattr("qtheta.cli.coefficient", lambda series, n: -1)
    result = run("count", "--kind", "N", "--form", "1,1,1", "--n", "3", "--via", "series")
    assert result.exit_code == 1
    assert "oracle=8" in result.stderr and "series=-1" in result.stderr


@pytest.mark.parametrize("args", [
    ["count", "--kind", "Q", "--form", "1,1,1", "--n", "1"],
    ["count", "--kind", "N", "--form", "1,1", "--n", "1"],
    ["count", "--kind", "N", "--form", "1,x,1", "--n", "1"],
    ["count", "--kind", "N", "--form", "1,1,1", "--n", "-1"],
    ["verify", "--order", "0"],
    ["verify", "--engine", "abacus"],
    ["verify", "--bogus"],
    ["scan", "--mem-limit", "lots"],
])
def test_usage_errors_exit_2(run, args):
    assert run(*args).exit_code == 2


def test_verify_identities(run):
    result = run("verify", "--file", str(PACKAGE_CORPUS / "identities.qid"), "--order", "4096")
    assert result.exit_code == 0, result.stdout
    assert "COUNTEREXAMPLE" not in result.stdout


def test_verify_missing_file(run):
    result = run("verify", "--file", "missing.json")
    assert result.exit_code == 2
    assert "missing.json" in result.stderr


def test_verify_errata_exits_1(run):
    result = run("verify", "--file", str(PACKAGE_CORPUS / "errata.json"), "--format", "json")
    assert result.exit_code == 1
    reports = json.loads(result.stdout)
    assert {r["status"] for r in reports} == {"counterexample"}
    assert all(r["witness_confirmed"] for r in reports)


def test_engine_error_exits_2(run):
    result = run("scan", "--max-n", "100", "--mem-limit", "1K")
    assert result.exit_code == 2
    assert "ResourceError" in result.stdout


def test_scan_small_range(run):
    result = run("scan", "--max-n", "1")
    assert result.exit_code == 0
    assert "SKIPPED" in result.stdout and "VERIFIED" in result.stdout


def test_scan_prints_correction_values(run, tmp_path):
    out = tmp_path / "report.json"
    result = run("scan", "--max-n", "600", "--out", str(out), "--format", "json")
    assert result.exit_code == 0
    reports = json.loads(out.read_text())
    assert all(r["status"] == "verified" for r in reports)
    [corr] = [r for r in reports if r["type"] == "correction_rule"]
    assert [9, -9] in corr["details"]["nonzero"]
    text = run("scan", "--max-n", "20").stdout
    assert "9:-9" in text


def test_format_follows_out_suffix(run, tmp_path):
    path = str(PACKAGE_CORPUS / "identities.qid")
    run("verify", "--file", path, "--order", "32", "--out", str(tmp_path / "r.json"))
    assert json.loads((tmp_path / "r.json").read_text())
    run("verify", "--file", path, "--order", "32", "--out", str(tmp_path / "r.csv"))
    assert (tmp_path / "r.csv").read_text().startswith("name,type,")
    run("verify", "--file", path, "--order", "32", "--out", str(tmp_path / "r.txt"))
    assert "VERIFIED" in (tmp_path / "r.txt").read_text()


def test_formats_agree(run):
    path = str(PACKAGE_CORPUS / "theorems.json")
    text = run("verify", "--file", path, "--max-n", "200").stdout
    js = json.loads(run("verify", "--file", path, "--max-n", "200", "--format", "json").stdout)
    rows = list(csv.DictReader(io.StringIO(
        run("verify", "--file", path, "--max-n", "200", "--format", "csv").stdout)))
    assert [r["status"] for r in js] == [r["status"] for r in rows]
    text_lines = [l for l in text.splitlines() if not l.startswith(" ")][:-1]
    assert [l.split()[0].lower() for l in text_lines] == [r["status"] for r in js]
    assert "elapsed" not in js[0]


def test_json_schema_and_timings(run):
    path = str(PACKAGE_CORPUS / "identities.qid")
    reports = json.loads(run("verify", "--file", path, "--order", "64", "--format", "json",
                             "--timings").stdout)
    keys = {"name", "type", "engine", "range", "status", "checked", "witness",
            "witness_confirmed", "message", "source", "details", "elapsed"}
    assert all(set(r) == keys for r in reports)


def test_output_is_deterministic_across_jobs(run):
    args = ["verify", "--file", str(PACKAGE_CORPUS / "gf_identities.json"), "--order", "256",
            "--format", "json"]
    assert run(*args).stdout == run(*args, "--jobs", "3").stdout


def test_bad_corpus_reports_location(run, tmp_path):
    bad = tmp_path / "bad.qid"
    bad.write_text("ok : 1 == 1\nbroken : phi(q == 1\n")
    result = run("verify", "--file", str(bad))
    assert result.exit_code == 2
    assert "bad.qid:2:" in result.stderr
