"""Drive the battle engine directly: spawn a scenario, step it with the
builtin opponent on both sides, and watch the outcome.

Run:  python demos/01_engine_basics.py
"""

from microarena import (apply_step, builtin_opponent, instantiate,
                        load_scenario)

spec = load_scenario("3m")
print(f"scenario {spec.id}: {spec.description}")

state = instantiate(spec, seed=42)
for unit in state.living():
    print(f"  uid {unit.uid}: {unit.spec.class_name} ({unit.team}) at "
          f"({unit.x / 1000:.2f}, {unit.y / 1000:.2f})")

# Both sides play the deterministic attack-nearest policy.
steps = 0
while True:
    result = apply_step(state,
                        builtin_opponent(state, "P1"),
                        builtin_opponent(state, "P2"))
    steps += 1
    if result.done:
        break

print(f"\nfinished after {steps} decision steps ({steps / 2:.1f} s simulated)")
print(f"outcome: {result.outcome.result}, reward {result.reward}")
for unit in state.units.values():
    status = "alive" if unit.alive else "dead"
    print(f"  uid {unit.uid} {unit.spec.class_name} ({unit.team}): {status}, "
          f"took {unit.damage_taken / 1000:.1f} damage")

# Determinism: the same inputs give the same trace, always.
rerun = instantiate(spec, seed=42)
while not apply_step(rerun, builtin_opponent(rerun, "P1"),
                     builtin_opponent(rerun, "P2")).done:
    pass
assert rerun.digest() == state.digest()
print("\nre-run reproduced the final state digest exactly")
