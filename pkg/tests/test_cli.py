import csv
import json
import subprocess
import sys

import pytest

from wignerwalks import cli, dyck, io
from wignerwalks.cli import EXIT_BUDGET, EXIT_CONFIG, EXIT_FAIL, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def test_enumerate(tmp_path, capsys):
    code, out, _ = run(capsys, "enumerate", "--s", "0-1", "--out", str(tmp_path))
    assert code == EXIT_OK
    assert len(io.read_walks(tmp_path / "walks_s1.jsonl")) == 2
    assert len(io.read_walks(tmp_path / "walks_s0.jsonl")) == 1
    summary = json.loads((tmp_path / "summary_s1.json").read_text())
    assert summary["walks"] == 2 and summary["by_theta"] == {"10": 2}


def test_enumerate_budget(tmp_path, capsys):
    out_dir = tmp_path / "e"
    code, _, err = run(capsys, "enumerate", "--s", "6", "--max-walks", "100", "--out", str(out_dir))
    assert code == EXIT_BUDGET
    reason = json.loads(err)
    assert reason["error"] == "budget" and reason["cap"] == 100 and reason["size"] == 65032
    assert not out_dir.exists()


def test_classify_and_reduce(tmp_path, capsys):
    assert run(capsys, "classify", "--s", "2", "--out", str(tmp_path))[0] == EXIT_OK
    rows = [json.loads(x) for x in (tmp_path / "profiles.jsonl").read_text().splitlines()]
    assert len(rows) == 8 and all(set(r) == {"labels", "kappa", "nu", "open_arrivals", "delta"} for r in rows)
    assert run(capsys, "reduce", "--s", "2", "--out", str(tmp_path))[0] == EXIT_OK
    cells = [json.loads(x) for x in (tmp_path / "cells.jsonl").read_text().splitlines()]
    assert len(cells) == 8 and all("K" in c for c in cells)


def test_verify_default_reports_root_gap(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--out", str(tmp_path))
    # the joint walk-count bound is exceeded on cells whose only twofold vertex is the root
    assert code == EXIT_FAIL
    rows = read_csv(tmp_path / "verify.csv")
    failed = [r for r in rows if r["satisfied"] == "false"]
    assert {r["bound_id"] for r in failed} == {"walk_count_joint"}
    assert len(failed) == 9
    witnesses = json.loads((tmp_path / "witnesses.json").read_text())
    assert len(witnesses) == 9
    walks_total = 2 + 8 + 50 + 433 + 4805
    per_walk = sum(1 for r in rows if r["bound_id"] in cli.bounds.PER_WALK_CHECKS)
    assert per_walk == walks_total * len(cli.bounds.PER_WALK_CHECKS)


def test_verify_row_accounting(tmp_path, capsys):
    code, _, _ = run(capsys, "verify", "--s", "1-3", "--joint-slots", "s+1", "--out", str(tmp_path))
    assert code == EXIT_OK
    rows = read_csv(tmp_path / "verify.csv")
    checks = len(cli.bounds.PER_WALK_CHECKS)
    per_walk = (2 + 8 + 50) * checks
    grid = [r for r in rows if r["bound_id"] in ("lemma_4_1", "L_property_4_17")]
    cells = [r for r in rows if r["bound_id"].startswith("walk_count")]
    assert len(rows) == per_walk + len(grid) + len(cells)
    assert len(grid) == 211876 + 65


def test_verify_rejects_corrupt_input(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"s": 2, "labels": [1, 2, 3, 1, 1]}\n')
    code, _, err = run(capsys, "verify", "--input", str(bad), "--out", str(tmp_path / "o"))
    assert code == EXIT_CONFIG
    assert json.loads(err)["error"] == "validation"


def test_moments_table(tmp_path, capsys):
    code, _, _ = run(capsys, "moments", "--s", "1-2", "--n", "2-3", "--trials", "50", "--out", str(tmp_path))
    assert code == EXIT_OK
    rows = read_csv(tmp_path / "moments.csv")
    get = {(r["s"], r["n"], r["method"]): r for r in rows}
    assert (get["1", "3", "exact"]["value_numerator"], get["1", "3", "exact"]["value_denominator"]) == ("3", "1")
    a, b = get["2", "2", "exact"], get["2", "2", "brute_force"]
    assert (a["value_numerator"], a["value_denominator"]) == (b["value_numerator"], b["value_denominator"])
    assert {r["method"] for r in rows} == {"exact", "polynomial", "brute_force", "z1", "z2", "z3", "z4", "mc"}


@pytest.mark.parametrize("V", ["cauchy", "2,1", "1,x"])
def test_moments_malformed_V(tmp_path, capsys, V):
    code, _, err = run(capsys, "moments", "--V", V, "--out", str(tmp_path))
    assert code == EXIT_CONFIG and json.loads(err)["error"] == "config"


def test_moments_inline_V(tmp_path, capsys):
    code, _, _ = run(capsys, "moments", "--s", "2", "--n", "2", "--V", "1,3", "--out", str(tmp_path))
    assert code == EXIT_OK
    exact = [r for r in read_csv(tmp_path / "moments.csv") if r["method"] == "exact"][0]
    assert exact["value_numerator"] + "/" + exact["value_denominator"] == "5/1"  # tests/oracles.py index-path sum


def test_report(tmp_path, capsys):
    out_dir = tmp_path / "nested" / "report"
    code, _, _ = run(capsys, "report", "--s", "4-10", "--trials", "40", "--out", str(out_dir))
    assert code == EXIT_OK
    assert len(read_csv(out_dir / "scaling.csv")) == 7
    b = read_csv(out_dir / "B_trend.csv")
    assert float(b[11]["B"]) == dyck.estimate_B(12, 0.5).value
    assert (out_dir / "height_histogram.csv").exists()


def test_outputs_byte_identical(tmp_path, capsys):
    for d in ("a", "b"):
        assert run(capsys, "moments", "--s", "1-3", "--n", "3", "--trials", "60", "--seed", "7", "--out", str(tmp_path / d))[0] == 0
        assert run(capsys, "report", "--s", "4-5", "--trials", "30", "--out", str(tmp_path / d))[0] == 0
    for name in ("moments.csv", "scaling.csv", "B_trend.csv", "height_histogram.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_config_files(tmp_path, capsys):
    y = tmp_path / "c.yaml"
    y.write_text("s: 1-2\nn: [2]\nV: gaussian\ntrials: 20\n")
    assert run(capsys, "moments", "--config", str(y), "--out", str(tmp_path / "y"))[0] == EXIT_OK
    j = tmp_path / "c.json"
    j.write_text(json.dumps({"s": [1, 2], "n": [2], "V": "gaussian", "trials": 20}))
    assert run(capsys, "moments", "--config", str(j), "--out", str(tmp_path / "j"))[0] == EXIT_OK
    assert (tmp_path / "y" / "moments.csv").read_bytes() == (tmp_path / "j" / "moments.csv").read_bytes()
    # flags override the file
    assert run(capsys, "moments", "--config", str(j), "--s", "1", "--out", str(tmp_path / "k"))[0] == EXIT_OK
    assert {r["s"] for r in read_csv(tmp_path / "k" / "moments.csv")} == {"1"}


@pytest.mark.parametrize(
    "content",
    [{"eps": "1/5"}, {"trials": 0}, {"s": []}, {"bogus": 1}, {"joint_slots": "2s"}, {"format": "xml"}],
)
def test_config_validation(tmp_path, capsys, content):
    j = tmp_path / "c.json"
    j.write_text(json.dumps(content))
    code, _, err = run(capsys, "moments", "--config", str(j), "--out", str(tmp_path))
    assert code == EXIT_CONFIG and json.loads(err)["error"] == "config"


def test_unreadable_config(tmp_path, capsys):
    code, _, _ = run(capsys, "moments", "--config", str(tmp_path / "missing.json"))
    assert code == EXIT_CONFIG


def test_module_entry_point(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "wignerwalks", "enumerate", "--s", "2", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0 and "8 walks" in res.stdout
