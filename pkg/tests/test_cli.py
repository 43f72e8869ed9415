"""End-to-end command line behavior: exit codes, reports, golden files.

Set RELFIX_REGEN_GOLDEN=1 to rewrite the golden reports from current
output (after an intentional format change), then inspect the diff.
"""

from __future__ import annotations

import hashlib
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
SPECS = HERE / "specs"
GOLDEN = HERE / "golden"


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "relfix.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


def test_solve_reports_sizes_and_checks():
    proc = run_cli("solve", "--spec", str(SPECS / "lazy_nat.spec"))
    assert proc.returncode == 0, proc.stderr
    report = json.loads(proc.stdout)
    assert report["command"] == "solve"
    assert report["result"]["sizes"] == [1, 3, 5, 7, 9, 11, 13]
    assert all(report["result"]["verification"].values())


def test_solve_emits_hasse_dot_files(tmp_path):
    proc = run_cli(
        "solve",
        "--spec",
        str(SPECS / "lazy_nat.spec"),
        "--emit-dot",
        str(tmp_path),
        "--report",
        str(tmp_path / "r.json"),
    )
    assert proc.returncode == 0, proc.stderr
    dot = (tmp_path / "X_2.dot").read_text()
    assert dot.startswith("digraph")
    assert dot.count("label") == 5
    assert dot.count("->") == 4
    assert sorted(p.name for p in tmp_path.glob("X_*.dot")) == [
        f"X_{i}.dot" for i in range(7)
    ]


def test_relate_is_byte_deterministic(tmp_path):
    out = []
    for k in range(2):
        path = tmp_path / f"run{k}.json"
        proc = run_cli(
            "relate",
            "--spec",
            str(SPECS / "streams.spec"),
            "--method",
            "all",
            "--seed",
            "11",
            "--report",
            str(path),
        )
        assert proc.returncode == 0, proc.stderr
        out.append(path.read_bytes())
    assert out[0] == out[1]


@pytest.mark.parametrize("name", ["lazy_nat", "streams", "reflexive"])
def test_golden_relate_reports_are_stable(name, tmp_path):
    path = tmp_path / "report.json"
    proc = run_cli(
        "relate",
        "--spec",
        str(SPECS / f"{name}.spec"),
        "--method",
        "all",
        "--report",
        str(path),
    )
    assert proc.returncode == 0, proc.stderr
    golden = GOLDEN / f"{name}_relate.json"
    if os.environ.get("RELFIX_REGEN_GOLDEN") == "1":
        golden.write_bytes(path.read_bytes())
    assert path.read_bytes() == golden.read_bytes()


def test_report_hash_is_the_sha256_of_the_spec_source():
    source = (SPECS / "reflexive.spec").read_bytes()
    proc = run_cli("relate", "--spec", str(SPECS / "reflexive.spec"), "--method", "kt")
    report = json.loads(proc.stdout)
    assert report["spec_sha256"] == hashlib.sha256(source).hexdigest()
    assert report["seed"] == 0
    assert report["tool_version"]


def test_method_specific_reports():
    kt = json.loads(
        run_cli("relate", "--spec", str(SPECS / "lazy_nat.spec"), "--method", "kt").stdout
    )
    assert kt["result"]["iterations"] == 7
    assert kt["result"]["neg_equals_pos"] is True
    banach = json.loads(
        run_cli(
            "relate", "--spec", str(SPECS / "lazy_nat.spec"), "--method", "banach"
        ).stdout
    )
    assert banach["result"]["stabilization_profile"] == [0, 1, 2, 3, 4, 5, 6]


def test_cli_depth_flag_overrides_the_spec():
    proc = run_cli(
        "solve", "--spec", str(SPECS / "lazy_nat.spec"), "--depth", "2"
    )
    assert json.loads(proc.stdout)["result"]["sizes"] == [1, 3, 5]


def test_karoubi_subcommand():
    proc = run_cli("karoubi", "--poset", "chain(3)")
    assert proc.returncode == 0, proc.stderr
    result = json.loads(proc.stdout)["result"]
    assert result["ed_size"] == 4
    assert result["cpo"]["ok"] and result["slice_equivalence"]["ok"]
    assert len(result["claim_audit"]) == 4
    assert json.loads(run_cli("karoubi", "--poset", "one").stdout)["result"]["ed_size"] == 1


def test_karoubi_chain5_completes_with_oversized_audits_skipped():
    proc = run_cli("karoubi", "--poset", "chain(5)")
    assert proc.returncode == 0, proc.stderr
    result = json.loads(proc.stdout)["result"]
    assert result["ed_size"] == 16
    assert all("skipped" in audit for audit in result["claim_audit"])


def test_check_suite_passes_and_fails_by_exit_code():
    ok = run_cli("check", "--suite", "lemma2")
    assert ok.returncode == 0, ok.stderr
    bad = run_cli("check", "--suite", "corrupted")
    assert bad.returncode == 1
    report = json.loads(bad.stdout)
    assert report["result"]["caught"] is True
    assert report["result"]["witness"]


def test_parse_failure_is_a_usage_error(tmp_path):
    bad = tmp_path / "bad.spec"
    bad.write_text("domain D = fun(D)\ndepth 1\n")
    proc = run_cli("relate", "--spec", str(bad), "--method", "all")
    assert proc.returncode == 2
    assert proc.stdout == ""
    assert "expected" in proc.stderr


def test_missing_spec_file_is_a_usage_error(tmp_path):
    proc = run_cli("solve", "--spec", str(tmp_path / "nope.spec"))
    assert proc.returncode == 2


def test_cap_excess_is_a_resource_error():
    proc = run_cli("solve", "--spec", str(SPECS / "reflexive.spec"), "--depth", "4")
    assert proc.returncode == 3
    assert "level" in proc.stderr


def test_timings_go_to_stderr_only():
    proc = run_cli(
        "solve", "--spec", str(SPECS / "lazy_nat.spec"), "--depth", "1", "--timings"
    )
    assert proc.returncode == 0
    json.loads(proc.stdout)  # stdout stays pure JSON
    assert "solve:" in proc.stderr
