"""Batch evaluation: win-rate table, stage-ablation sweep, and a
head-to-head record, all with deterministic scripted backends.

Run:  python demos/05_evaluation_harness.py     (~30 s)
"""

from microarena.harness import cmd_ablate, cmd_pvp, cmd_run

print("win rates: scripted focus-fire vs the builtin opponent")
report = cmd_run(["3m", "2m_vs_1z", "6r_vs_8z"], "scripted:focus_fire",
                 episodes=10, seed_base=0, workers=4)
print(report.text_table())

print("\nstage-ablation sweep on 3m (8 toggle rows)")
ablation = cmd_ablate("3m", "scripted:focus_fire", episodes=3, seed_base=0,
                      workers=4)
print(ablation.text_table())

print("\nhead-to-head: focus fire vs random targeting, side-alternated")
pvp = cmd_pvp("3m", "scripted:focus_fire", "scripted:random", matches=30,
              seed_base=0, workers=4)
print(pvp.text_table())
