import json
import subprocess
import sys

import pytest

from qaoabench.cli import main
from qaoabench.harness import parse_report, read_trials
from qaoabench.problems import gen_rim, load_instance

SMALL = ["--outer", "4", "--inner", "3", "--jobs", "1"]


def run(args, capsys):
    code = main([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, out, err


def exit_code(args):
    try:
        return main(args)
    except SystemExit as exc:  # argparse rejects the command line
        return exc.code


def test_gen_rim_single_and_batch(tmp_path, capsys):
    code, out, _ = run(["gen-rim", "--seed", 4, "--nodes", 7], capsys)
    assert code == 0
    data = json.loads(out)
    assert set(data) == {"kind", "n", "edges", "fields"} and data["n"] == 7
    assert data == gen_rim(4, 7).to_dict()

    code, _, _ = run(["gen-rim", "--seed", 1, "--count", 3, "--min-nodes", 5, "--max-nodes", 6,
                      "--out", tmp_path / "inst"], capsys)
    assert code == 0
    files = sorted((tmp_path / "inst").glob("*.json"))
    assert len(files) == 3
    assert all(5 <= load_instance(f).n <= 6 for f in files)


def test_oracle(tmp_path, capsys):
    code, out, _ = run(["oracle", "--problem", "complete", "--nodes", 10], capsys)
    assert code == 0 and json.loads(out)["opt_value"] == 25
    path = tmp_path / "c4.json"
    path.write_text(json.dumps({"kind": "maxcut_cyclic", "n": 4, "edges": [[0, 1], [0, 3], [1, 2], [2, 3]],
                                "fields": [0, 0, 0, 0]}))
    code, out, _ = run(["oracle", path], capsys)
    res = json.loads(out)
    assert code == 0 and res["opt_value"] == 4 and sorted(res["argmax"]) == ["0101", "1010"]


def test_run_writes_raw_summary_and_traces(tmp_path, capsys):
    raw, summary, traces = tmp_path / "raw.csv", tmp_path / "s.json", tmp_path / "t.csv"
    args = ["run", "--problem", "cyclic", "--nodes", 4, "--layers", 2, "--entangled", "--optimizer", "ls-sum",
            "--trials", 3, "--seed", 5, "--out", raw, "--summary", summary, "--format", "json",
            "--dump-traces", traces] + SMALL
    code, _, _ = run(args, capsys)
    assert code == 0
    recs = read_trials(raw)
    assert [r.trial for r in recs] == [0, 1, 2]
    assert all(r.evals == 16 for r in recs)
    assert recs[0].config_id == "maxcut_cyclic-n4.6p-ent.ls_sum.4x3"
    rows = parse_report(summary.read_text(), "json")
    assert rows[0].model == "6p ent"
    assert len(traces.read_text().splitlines()) == 1 + 3 * 4

    # resuming a finished file is a no-op
    before = raw.read_text()
    assert run(args, capsys)[0] == 0
    assert raw.read_text() == before


def test_run_prints_csv_summary(capsys):
    code, out, _ = run(["run", "--problem", "rim", "--nodes", 5, "--rim-seed", 2, "--trials", 2] + SMALL, capsys)
    assert code == 0
    assert out.splitlines()[0] == "model,best,mean,var"
    assert out.splitlines()[1].startswith("3p,")


def test_run_from_instance_file(tmp_path, capsys):
    path = tmp_path / "i.json"
    path.write_text(json.dumps(gen_rim(3, 6).to_dict()))
    code, out, _ = run(["run", "--instance", path, "--trials", 1] + SMALL, capsys)
    assert code == 0


@pytest.mark.parametrize("args", [
    ["run", "--layers", "4"],
    ["run", "--problem", "cyclic", "--nodes", "2"],
    ["run", "--problem", "rim", "--nodes", "3"],
    ["run", "--trials", "0"],
    ["run", "--outer", "0"],
    ["oracle", "--problem", "cyclic", "--nodes", "22"],
    ["campaign", "--out", "x", "--models", "5p"],
    ["frobnicate"],
])
def test_configuration_errors_exit_1(args, capsys):
    assert exit_code(args) == 1


def test_bad_instance_file_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    code, _, err = run(["oracle", bad], capsys)
    assert code == 1 and "bad.json" in err


def test_io_errors_exit_2(tmp_path, capsys):
    code, _, err = run(["oracle", tmp_path / "absent.json"], capsys)
    assert code == 2
    code, _, err = run(["run", "--trials", 1, "--out", tmp_path / "no" / "raw.csv"] + SMALL, capsys)
    assert code == 2 and "raw.csv" in err
    code, _, _ = run(["report", tmp_path / "absent.csv"], capsys)
    assert code == 2


def test_maxcut_campaign_and_report(tmp_path, capsys):
    out = tmp_path / "camp"
    code, _, _ = run(["campaign", "--problem", "complete", "--nodes", 4, "--models", "3p,3p-ent",
                      "--optimizer", "shc-rr", "--optimizer", "ls", "--trials", 2, "--out", out] + SMALL, capsys)
    assert code == 0
    rows = parse_report((out / "summary-shc_rr.csv").read_text())
    assert [r.model for r in rows] == ["3p", "3p ent"]
    assert (out / "summary-ls_mult.csv").exists()

    raws = sorted((out / "raw").glob("*shc_rr*.csv"))
    code, text, _ = run(["report"] + raws, capsys)
    assert code == 0
    assert parse_report(text) == rows


def test_rim_campaign_and_report(tmp_path, capsys):
    out = tmp_path / "rim"
    code, _, _ = run(["campaign", "--problem", "rim", "--count", 3, "--min-nodes", 5, "--max-nodes", 5,
                      "--models", "3p,6p", "--optimizer", "shc-rr", "--out", out] + SMALL, capsys)
    assert code == 0
    rows = parse_report((out / "summary-shc_rr.csv").read_text())
    assert [r.model for r in rows] == ["3p", "6p"]
    assert all(r.mean_diff <= 0 for r in rows)
    code, text, _ = run(["report", out / "cells-shc_rr.csv", "--format", "json"], capsys)
    assert code == 0
    assert parse_report(text, "json") == rows


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qaoabench", "oracle", "--problem", "cyclic", "--nodes", "15"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["opt_value"] == 14
