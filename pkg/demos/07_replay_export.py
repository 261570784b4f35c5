"""Replays: record an episode, verify it by digest-checked re-simulation,
and export annotated PNG frames.

Run:  python demos/07_replay_export.py    (writes replay_frames/ here)
"""

from pathlib import Path

from microarena import RenderConfig, ScriptedBackend, run_episode
from microarena.replay import export_frames, read_replay, write_replay

run = run_episode("2m_vs_1z", seed=5,
                  backend_p1=ScriptedBackend("focus_fire", seed=5))
print(f"episode: {run.outcome.result} in {run.steps} steps")

replay_path = Path(__file__).parent / "episode.jsonl"
write_replay(replay_path, run.replay)
header, steps = read_replay(replay_path)
print(f"replay: scenario {header['scenario']} seed {header['seed']}, "
      f"{len(steps)} step records")

frames_dir = Path(__file__).parent / "replay_frames"
frames = export_frames(replay_path, frames_dir,
                       RenderConfig(height=256, width=256))
print(f"re-simulated with digest verification; wrote {len(frames)} frames "
      f"to {frames_dir.name}/ (initial state + one per step)")
