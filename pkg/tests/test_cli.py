import json
from pathlib import Path

import pytest

from soccer2d.cli import EXIT_INVALID, EXIT_OK, EXIT_USAGE, main
from soccer2d.engine.match import ExperimentReport, audit_replay
from soccer2d.geometry import TeamSide
from soccer2d.snapshot import SnapshotError, dump_snapshot, load_snapshot, snapshot_from_dict

ROOT = Path(__file__).resolve().parents[1]
CONFIG = str(ROOT / "configs" / "default.yaml")
FIX = Path(__file__).resolve().parent / "fixtures"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_accepts_the_default_config(capsys):
    code, out, _ = run(capsys, "validate", "--config", CONFIG)
    assert code == EXIT_OK and out.strip().endswith(": ok")


def test_validate_rejects_a_bad_config(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("cycles: 100\nmotion:\n  ball_decay: 2.0\n")
    code, _, err = run(capsys, "validate", "--config", str(bad))
    assert code == EXIT_INVALID and "line" in err
    code, _, _ = run(capsys, "validate", "--config", str(tmp_path / "missing.yaml"))
    assert code == EXIT_INVALID


@pytest.mark.parametrize(
    "argv",
    [
        ["match"],
        ["match", "--config", CONFIG, "--cycles", "0"],
        ["match", "--config", CONFIG, "--blocking", "maybe"],
        ["experiment", "--config", CONFIG, "--matches-per-arm", "0"],
        ["analyze", "--snapshot", "x.json", "--skill", "shoot"],
        ["fly"],
    ],
)
def test_usage_errors_exit_one(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_USAGE


def test_match_prints_summary_and_writes_a_repeatable_replay(tmp_path, capsys):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    argv = ["match", "--config", CONFIG, "--seed", "4", "--cycles", "150", "--attacker", "medium"]
    code, out, _ = run(capsys, *argv, "--replay", str(a))
    assert code == EXIT_OK
    assert out.startswith("score ") and "seed=4" in out
    assert run(capsys, *argv, "--replay", str(b))[1] == out
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert json.loads(lines[0])["attacker_level"] == "medium"
    assert audit_replay(lines).ok


def test_experiment_table_and_report(tmp_path, capsys):
    short = tmp_path / "short.yaml"
    short.write_text(Path(CONFIG).read_text().replace("cycles: 3000", "cycles: 30"))
    out1, out2 = tmp_path / "j1.json", tmp_path / "j2.json"
    code, table, _ = run(capsys, "experiment", "--config", str(short), "--matches-per-arm", "1", "--out", str(out1))
    assert code == EXIT_OK
    assert [l.split()[0] for l in table.splitlines() if l.split()[0] in ("weak", "medium", "strong")] == [
        "weak",
        "medium",
        "strong",
    ]
    run(capsys, "experiment", "--config", str(short), "--matches-per-arm", "1", "--out", str(out2), "--jobs", "2")
    assert out1.read_text() == out2.read_text()
    assert ExperimentReport.from_json(out1.read_text()).cycles == 30


def test_analyze_through_pass(capsys):
    code, out, _ = run(capsys, "analyze", "--snapshot", str(FIX / "through_scene.json"), "--skill", "through", "--explain")
    lines = out.splitlines()
    assert code == EXIT_OK
    assert lines[0].startswith("decision: through pass to 9 at ")
    assert any(l.endswith("verdict offside") for l in lines[1:])
    assert lines[-1].endswith("verdict ok")


def test_analyze_direct_pass_lists_every_teammate(capsys):
    code, out, _ = run(capsys, "analyze", "--snapshot", str(FIX / "through_scene.json"), "--skill", "pass", "--explain")
    lines = out.splitlines()
    assert code == EXIT_OK
    assert lines[0].startswith("decision: pass to 9 ")
    assert len(lines) == 1 + 10
    row = next(l for l in lines if l.startswith("teammate 9 "))
    for key in ("e_lane", "e_progress", "e_receiver_space", "e_length", "first_reacher left:9", "safe yes"):
        assert key in row


def test_analyze_dribble_and_block(capsys):
    code, out, _ = run(capsys, "analyze", "--snapshot", str(FIX / "through_scene.json"), "--skill", "dribble", "--explain")
    assert code == EXIT_OK and out.startswith("decision: ")
    assert sum(l.startswith("path ") for l in out.splitlines()) == 5
    code, out, _ = run(capsys, "analyze", "--snapshot", str(FIX / "block_scene.json"), "--skill", "block", "--explain")
    assert code == EXIT_OK
    assert out.startswith("decision: block by 5 at (-13.6750, 0.0000) mode wait")
    assert "defender 2 gate too_far" in out


def test_analyze_refuses_a_ball_nobody_owns(capsys):
    for skill in ("pass", "through", "dribble", "block"):
        code, _, err = run(capsys, "analyze", "--snapshot", str(FIX / "loose_ball.json"), "--skill", skill)
        assert code == EXIT_INVALID and "invalid input" in err


def test_analyze_rejects_broken_snapshots(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "analyze", "--snapshot", str(bad), "--skill", "pass")[0] == EXIT_INVALID


def test_snapshot_round_trip():
    snap = load_snapshot(FIX / "through_scene.json")
    assert snap.side is TeamSide.LEFT
    assert load_snapshot_text(dump_snapshot(snap)) == snap


def load_snapshot_text(text):
    return snapshot_from_dict(json.loads(text))


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.update(version=9),
        lambda d: d.update(extra=1),
        lambda d: d.update(side="up"),
        lambda d: d["ball"].update(pos=[1.0]),
        lambda d: d["players"][0].pop("pos"),
        lambda d: d["players"][0].update(uniform="x"),
    ],
)
def test_snapshot_validation(mutate):
    doc = json.loads((FIX / "through_scene.json").read_text())
    mutate(doc)
    with pytest.raises(SnapshotError):
        snapshot_from_dict(doc)


def test_analyze_uses_the_config_flag(capsys):
    code, out, _ = run(
        capsys, "analyze", "--snapshot", str(FIX / "through_scene.json"), "--skill", "pass", "--config", CONFIG
    )
    assert code == EXIT_OK
    assert out == run(capsys, "analyze", "--snapshot", str(FIX / "through_scene.json"), "--skill", "pass")[1]
