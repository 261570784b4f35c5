"""Run the full staged decision pipeline for one episode and inspect the
transcript: every prompt, every response, every retrieval.

Run:  python demos/03_agent_pipeline.py
"""

from microarena import AblationConfig, ScriptedBackend, run_episode

run = run_episode("mixed_units", seed=3,
                  backend_p1=ScriptedBackend("focus_fire", seed=3))

print(f"outcome {run.outcome.result} after {run.steps} steps, "
      f"reward {run.reward}")

transcript = run.transcripts["P1"]
print(f"\nbackend calls: {len(transcript.calls)}")
for stage in ("Plan", "Analyze", "Role", "Act"):
    print(f"  {stage}: {transcript.stage_count(stage)}")
print(f"knowledge retrievals: {len(transcript.retrievals)} "
      f"(first 5: {transcript.retrievals[:5]})")

first_act = next(c for c in transcript.calls if c.stage == "Act")
print("\n--- first Act prompt (truncated) ---")
print("\n".join(first_act.prompt.splitlines()[:18]))
print("...")
print("\n--- response ---")
print(first_act.response)

# Toggling a stage off removes its calls entirely.
lean = run_episode("mixed_units", seed=3,
                   backend_p1=ScriptedBackend("focus_fire", seed=3),
                   ablation=AblationConfig(role_enabled=False,
                                           mpi_enabled=False,
                                           rag_enabled=True))
t = lean.transcripts["P1"]
print(f"\nwith role+analysis off: Analyze={t.stage_count('Analyze')} "
      f"Role={t.stage_count('Role')} retrievals={len(t.retrievals)}")
