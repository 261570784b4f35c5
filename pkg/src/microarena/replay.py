"""Replay files: append-only JSONL, one record per decision step.

A replay stores (scenario, seed) plus every step's canonical action lines
and post-step state digest.  Re-simulation replays the actions through the
engine and checks each digest, so corruption or engine drift is detected at
the exact step it appears; frames are re-rendered from the reconstructed
states.
"""

from __future__ import annotations

import json
from pathlib import Path

from .engine import apply_step
from .errors import CorruptReplay
from .parsing import LineRejection, parse_action_line
from .render import RenderConfig, encode_png, render_frame
from .scenarios import instantiate, load_scenario
from .units import UnitCatalog, default_catalog


def write_replay(path: str | Path, records: list[dict]) -> None:
    with open(path, "w") as f:
        for record in records:
            f.write(json.dumps(record, separators=(",", ":")) + "\n")


def read_replay(path: str | Path) -> tuple[dict, list[dict]]:
    """Returns (header, step records); raises CorruptReplay on bad framing."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise CorruptReplay(-1, "empty file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise CorruptReplay(-1, f"bad header: {exc}") from None
    if header.get("kind") != "replay":
        raise CorruptReplay(-1, "not a replay file")
    steps = []
    last_good = 0
    for line in lines[1:]:
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorruptReplay(last_good, f"bad step record: {exc}") from None
        if "step" not in record or "digest" not in record:
            raise CorruptReplay(last_good, "step record missing fields")
        steps.append(record)
        last_good = record["step"]
    return header, steps


def _parse_lines(lines: list[str], step: int) -> list:
    actions = []
    for line in lines:
        parsed = parse_action_line(line)
        if isinstance(parsed, LineRejection):
            raise CorruptReplay(step, f"unparseable action line {line!r}")
        actions.append(parsed)
    return actions


def resimulate(header: dict, steps: list[dict],
               catalog: UnitCatalog | None = None,
               verify_digests: bool = True):
    """Yield (step_index, BattleState) for the initial state and each step.

    State 0 is the instantiated battle; state k is after replaying record k.
    Digest mismatches raise CorruptReplay carrying the last good step.
    """
    catalog = catalog or default_catalog()
    scenario = load_scenario(header["scenario"], catalog)
    state = instantiate(scenario, int(header["seed"]), catalog)
    if verify_digests and "initial_digest" in header:
        if state.digest() != header["initial_digest"]:
            raise CorruptReplay(0, "initial state digest mismatch")
    yield 0, state
    last_good = 0
    for record in steps:
        step = record["step"]
        apply_step(state,
                   _parse_lines(record.get("p1", []), step),
                   _parse_lines(record.get("p2", []), step))
        if verify_digests and state.digest() != record["digest"]:
            raise CorruptReplay(last_good, "state digest mismatch")
        last_good = step
        yield step, state


def export_frames(replay_path: str | Path, frames_dir: str | Path,
                  config: RenderConfig | None = None,
                  catalog: UnitCatalog | None = None) -> list[Path]:
    """Render one annotated PNG per decision step (initial state included)
    plus a step log; deterministic re-render from the recorded actions."""
    config = (config or RenderConfig()).validate()
    frames_dir = Path(frames_dir)
    frames_dir.mkdir(parents=True, exist_ok=True)
    header, steps = read_replay(replay_path)

    written: list[Path] = []
    log_lines: list[str] = []
    for index, state in resimulate(header, steps, catalog):
        frame_path = frames_dir / f"step_{index:04d}.png"
        frame_path.write_bytes(encode_png(render_frame(state, config)))
        written.append(frame_path)
    for record in steps:
        log_lines.append(json.dumps({
            "step": record["step"], "reward": record.get("reward", 0),
            "p1": record.get("p1", []), "p2": record.get("p2", []),
            "rejections": record.get("rejections", []),
        }))
    (frames_dir / "steps.log").write_text("\n".join(log_lines) + "\n")
    return written
