"""CLI surface: local run/replay/evaluate plumbing and exit codes."""

import json

import pytest
from click.testing import CliRunner

from tandem.cli import main
from tandem.harness.trajectory import TrajectoryWriter, load_trajectory


@pytest.fixture
def runner():
    return CliRunner()


def write_script(tmp_path, lines):
    path = tmp_path / "script.txt"
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture
def trajectory_file(runner, tmp_path):
    """Run one scripted toy session through the CLI and return the output path."""
    script = write_script(tmp_path, ["POST(text=down by the river)", "FINISH()"])
    out = tmp_path / "run.jsonl"
    result = runner.invoke(
        main, ["run", "toy/toy-board", "--agent-script", script, "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    return out


def test_tasks_lists_builtins_and_instances(runner):
    result = runner.invoke(main, ["tasks"])
    assert result.exit_code == 0
    for task_id in ("toy", "travel", "related_work", "tabular"):
        assert task_id in result.output
    # instance refs are indented task/instance lines
    assert "  toy/toy-board" in result.output


def test_run_prints_summary_and_writes_trajectory(runner, tmp_path):
    script = write_script(tmp_path, ["POST(text=down by the river)", "FINISH()"])
    out = tmp_path / "session.jsonl"
    result = runner.invoke(
        main, ["run", "toy/toy-board", "--agent-script", script, "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    summary = json.loads(result.output[: result.output.rindex("}") + 1])
    assert summary["done"] is True
    assert summary["delivered"] is True
    assert summary["reward"] == 1.0
    assert summary["events"] >= 2
    assert out.exists()
    header = json.loads(out.read_text().splitlines()[0])
    assert header["format"] == "tandem.trajectory.v1"


def test_run_unknown_instance_fails_cleanly(runner):
    result = runner.invoke(main, ["run", "toy/does-not-exist"])
    assert result.exit_code == 1
    assert "does-not-exist" in result.output + result.stderr


def test_replay_ok_exits_zero(runner, trajectory_file):
    result = runner.invoke(main, ["replay", str(trajectory_file)])
    assert result.exit_code == 0, result.output
    assert "replay ok" in result.output


def test_replay_tampered_exits_two(runner, trajectory_file, tmp_path):
    lines = trajectory_file.read_text().strip().splitlines()
    event = json.loads(lines[1])
    event["action"] = "POST(text=forged)"
    lines[1] = json.dumps(event)
    bad = tmp_path / "tampered.jsonl"
    bad.write_text("\n".join(lines) + "\n")

    result = runner.invoke(main, ["replay", str(bad)])
    assert result.exit_code == 2
    assert "TAMPERED at event 0" in result.stderr


def test_replay_diverged_exits_three(runner, trajectory_file, tmp_path):
    # re-chain a forged event so the hash chain is valid but semantics differ
    traj = load_trajectory(trajectory_file)
    writer = TrajectoryWriter(
        {k: v for k, v in traj.header.items() if k not in ("type", "format")}
    )
    for event in traj.events:
        doc = {k: v for k, v in event.items() if k not in ("type", "hash")}
        if doc["action"].startswith("POST"):
            doc["action"] = "POST(text=forged)"
        writer.record_event(doc)
    forged = writer.finalize(
        {k: v for k, v in traj.final.items() if k not in ("type", "hash")}
    )
    bad = tmp_path / "diverged.jsonl"
    bad.write_text(forged.dumps())

    result = runner.invoke(main, ["replay", str(bad)])
    assert result.exit_code == 3
    assert "DIVERGED" in result.stderr


def test_evaluate_prints_reports_and_csv(runner, trajectory_file, tmp_path):
    csv_out = tmp_path / "summary.csv"
    result = runner.invoke(
        main, ["evaluate", str(trajectory_file), "--csv", str(csv_out)]
    )
    assert result.exit_code == 0, result.output
    report = json.loads(result.output.splitlines()[0])
    assert report["task_id"] == "toy"
    assert report["delivered"] is True
    rows = csv_out.read_text().strip().splitlines()
    assert len(rows) == 2  # header + one trajectory
    assert rows[0].startswith("instance_id,task_id,delivered")


def test_evaluate_accepts_multiple_files(runner, trajectory_file, tmp_path):
    clone = tmp_path / "copy.jsonl"
    clone.write_text(trajectory_file.read_text())
    result = runner.invoke(main, ["evaluate", str(trajectory_file), str(clone)])
    assert result.exit_code == 0
    assert len(result.output.strip().splitlines()) == 2
