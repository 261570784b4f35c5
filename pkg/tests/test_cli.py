from __future__ import annotations

import json

from microarena.cli import main


def test_run_command(tmp_path, capsys):
    out = tmp_path / "report"
    code = main(["run", "--scenario", "3m", "--backend", "scripted:focus_fire",
                 "--episodes", "3", "--seed", "0", "--out", str(out),
                 "--workers", "2"])
    assert code == 0
    data = json.loads(out.with_suffix(".json").read_text())
    assert data["rows"][0]["episodes"] == 3
    printed = capsys.readouterr().out
    assert "Map Scenario" in printed


def test_run_rejects_unknown_scenario(capsys):
    code = main(["run", "--scenario", "not_a_map", "--backend",
                 "scripted:idle", "--episodes", "1"])
    assert code == 1


def test_ablate_grid_command(tmp_path):
    out = tmp_path / "ablation"
    code = main(["ablate", "--scenario", "3m", "--backend",
                 "scripted:focus_fire", "--episodes", "1", "--out", str(out),
                 "--workers", "2"])
    assert code == 0
    rows = json.loads(out.with_suffix(".json").read_text())["rows"]
    assert len(rows) == 8
    off_rows = [r for r in rows if not r["mpi"]]
    assert off_rows and all(r["analyze_calls"] == 0 for r in off_rows)


def test_ablate_single_combination(tmp_path):
    out = tmp_path / "single"
    code = main(["ablate", "--scenario", "3m", "--backend",
                 "scripted:focus_fire", "--episodes", "1", "--no-mpi",
                 "--out", str(out)])
    assert code == 0
    rows = json.loads(out.with_suffix(".json").read_text())["rows"]
    assert len(rows) == 1 and rows[0]["mpi"] is False


def test_pvp_command(capsys):
    code = main(["pvp", "--scenario", "3m", "--backend-a",
                 "scripted:focus_fire", "--backend-b", "scripted:idle",
                 "--matches", "4", "--workers", "2"])
    assert code == 0
    assert "4:0" in capsys.readouterr().out


def test_replay_command(tmp_path):
    from microarena.backends import ScriptedBackend
    from microarena.pipeline import run_episode
    from microarena.replay import write_replay

    run = run_episode("3m", 2, ScriptedBackend("focus_fire", seed=2),
                      max_steps=4)
    replay_path = tmp_path / "ep.jsonl"
    write_replay(replay_path, run.replay)
    frames_dir = tmp_path / "frames"
    code = main(["replay", "--in", str(replay_path),
                 "--frames", str(frames_dir)])
    assert code == 0
    assert len(list(frames_dir.glob("step_*.png"))) == run.steps + 1


def test_config_file_flags_win(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"render": {"height": 256, "width": 256}}))
    out = tmp_path / "r"
    code = main(["--config", str(config), "run", "--scenario", "3m",
                 "--backend", "scripted:idle", "--episodes", "1",
                 "--out", str(out)])
    assert code == 0


def test_bad_config_path():
    code = main(["--config", "/does/not/exist.json", "run", "--scenario",
                 "3m", "--backend", "scripted:idle", "--episodes", "1"])
    assert code == 2


def test_dry_run_prints_prompts_without_network(capsys, monkeypatch):
    monkeypatch.delenv("AVA_API_URL", raising=False)  # prove no endpoint needed
    code = main(["run", "--scenario", "3m", "--backend", "remote:gpt-4o",
                 "--dry-run", "--seed", "1"])
    assert code == 0
    out = capsys.readouterr().out
    for stage in ("Plan", "Analyze", "Role", "Act"):
        assert f"{stage} prompt" in out
    assert "## Command grammar" in out


def test_dry_run_respects_ablation(capsys):
    code = main(["run", "--scenario", "3m", "--backend", "scripted:idle",
                 "--dry-run", "--no-mpi", "--no-role"])
    assert code == 0
    out = capsys.readouterr().out
    assert "Analyze prompt" not in out
    assert "Role prompt" not in out
