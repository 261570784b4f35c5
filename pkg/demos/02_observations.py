"""Build the three-part observation: annotated RGB frame, battlefield text,
and structured unit records.

Run:  python demos/02_observations.py      (writes frame_*.png here)
"""

from pathlib import Path

from microarena import (RenderConfig, apply_step, builtin_opponent,
                        instantiate, load_scenario, observe)
from microarena.render import encode_png

state = instantiate(load_scenario("mixed_units"), seed=7)
config = RenderConfig(height=512, width=512, show_grid=True, show_tags=True)

out_dir = Path(__file__).parent
for step in (0, 10, 20):
    while state.decision_step < step:
        result = apply_step(state, builtin_opponent(state, "P1"),
                            builtin_opponent(state, "P2"))
        if result.done:
            break
    obs = observe(state, "P1", config)
    path = out_dir / f"frame_{state.decision_step:03d}.png"
    path.write_bytes(encode_png(obs.image))
    print(f"wrote {path.name}  ({obs.height}x{obs.width}, "
          f"{len(obs.annotations)} annotations)")

print("\n--- battlefield description ---")
print(obs.text)

print("\n--- first three unit records ---")
for record in obs.units[:3]:
    print(f"{record.label} (uid {record.id}) {record.team} grid {record.grid} "
          f"hp {record.status['health']}/{record.status['max_health']}")

print("\n--- annotations (pixel space) ---")
for a in obs.annotations[:3]:
    print(f"tag {a.tag}: {a.c} center {a.p} box {a.b}")
