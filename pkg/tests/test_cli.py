"""CLI surface: every subcommand exercisable headless, exit codes, help."""

import json
import time

import pytest

from negspace.runtime.cli import main
from negspace.tasks import read_event_log, score_log, summarize


def run_cli(capsys, *argv):
    status = main(list(argv))
    output = capsys.readouterr()
    return status, output.out, output.err


def test_analyze_text_and_json(capsys, tmp_path):
    t0 = time.perf_counter()
    status, out, _ = run_cli(capsys, "analyze")
    assert status == 0
    assert time.perf_counter() - t0 < 5.0
    lines = out.strip().splitlines()
    assert len(lines) == 10  # header + rule + 8 rows
    for name in ("RL", "SS", "MP", "MW"):
        assert any(line.startswith(name) for line in lines)

    out_path = tmp_path / "matrix.json"
    status, out, _ = run_cli(capsys, "analyze", "--json", "--out", str(out_path))
    assert status == 0
    doc = json.loads(out)
    assert len(doc) == 8
    assert json.loads(out_path.read_text()) == doc
    by_name = {row["name"]: row for row in doc if row["name"]}
    assert by_name["SS"]["lateral_pointing"] == "mismatch"
    assert by_name["MP"]["lateral_pointing"] == "match"


def test_puzzle_gen_is_deterministic_and_validates(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli(capsys, "puzzle", "gen", "--seed", "3", "--out", str(a))[0] == 0
    assert run_cli(capsys, "puzzle", "gen", "--seed", "3", "--out", str(b))[0] == 0
    assert a.read_text() == b.read_text()

    status, out, _ = run_cli(capsys, "puzzle", "validate", str(a))
    assert status == 0
    assert "FAIL" not in out

    # corrupting the certificate makes validation fail with exit 1
    doc = json.loads(a.read_text())
    doc["complexity"]["total_distance"] += 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    status, out, _ = run_cli(capsys, "puzzle", "validate", str(bad))
    assert status == 1
    assert "FAIL" in out


def test_simulate_writes_logs_and_stats_matches_oracle(capsys, tmp_path):
    log_dir = tmp_path / "logs"
    status, out, _ = run_cli(capsys, "simulate", "--seed", "4",
                             "--out-dir", str(log_dir))
    assert status == 0
    task_files = sorted(log_dir.glob("task_*.jsonl"))
    assert len(task_files) == 8
    assert (log_dir / "training.jsonl").exists()

    status, out, _ = run_cli(capsys, "stats", str(log_dir / "task_*.jsonl"))
    assert status == 0
    rows = [score_log(read_event_log(p)) for p in task_files]
    table = summarize(rows)
    for cond, metrics in table.items():
        assert cond in out
        median, _ = metrics["completion_time"]
        assert f"{median:.4g}" in out


def test_proj_reports_corner_ndc(capsys):
    status, out, _ = run_cli(capsys, "proj", "--eye", "0.1,0.2,-1.25")
    assert status == 0
    assert "projection matrix" in out
    assert "ok" in out
    status, out, err = run_cli(capsys, "proj", "--eye", "nonsense")
    assert status == 2


def test_domain_error_maps_to_exit_1(capsys):
    status, _, err = run_cli(capsys, "puzzle", "gen", "--seed", "1",
                             "--min-step-distance", "99")
    assert status == 1
    assert "error" in err


def test_usage_error_exits_2_and_help_everywhere(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bogus-command"])
    assert exc.value.code == 2
    for argv in (["--help"], ["simulate", "--help"], ["puzzle", "--help"],
                 ["puzzle", "gen", "--help"], ["serve", "--help"],
                 ["client", "--help"], ["stats", "--help"], ["proj", "--help"],
                 ["analyze", "--help"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 0
        capsys.readouterr()
