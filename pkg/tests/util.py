"""Shared test helpers: hand-built states and the random action policy."""

from __future__ import annotations

from microarena.actions import Attack, MoveGrid
from microarena.engine import BattleState, UnitState, apply_step
from microarena.rng import SplitMix64
from microarena.units import default_catalog


def make_state(units, arena=32.0, abilities_enabled=True,
               scenario_id="handmade") -> BattleState:
    """units: iterable of (class_name, team, x_world, y_world[, overrides])."""
    catalog = default_catalog()
    states = {}
    for i, entry in enumerate(units, start=1):
        cls, team, x, y = entry[:4]
        overrides = entry[4] if len(entry) > 4 else {}
        spec = catalog[cls]
        u = UnitState(uid=i, spec=spec, team=team,
                      x=int(x * 1000), y=int(y * 1000),
                      health=spec.max_health, shields=spec.max_shields,
                      energy=spec.start_energy)
        for key, value in overrides.items():
            setattr(u, key, value)
        states[i] = u
    return BattleState(scenario_id=scenario_id,
                       arena_w=int(arena * 1000), arena_h=int(arena * 1000),
                       units=states, catalog=catalog,
                       abilities_enabled=abilities_enabled, rng_state=0)


def random_actions(state: BattleState, team: str, rng: SplitMix64):
    """Random legal-ish policy: each unit 50/50 attacks a random enemy or
    moves to a random grid cell."""
    from microarena.engine import other_team
    enemies = [u.uid for u in state.living(other_team(team))]
    actions = []
    for unit in state.living(team):
        if enemies and rng.next_below(2) == 0:
            actions.append(Attack(unit.uid, enemies[rng.next_below(len(enemies))]))
        else:
            actions.append(MoveGrid(unit.uid, rng.next_range(1, 10),
                                    rng.next_range(1, 10)))
    return actions


def run_random_episode(state: BattleState, seed: int, max_steps: int = 600):
    """Drive both sides with the random policy; returns (results, final state)."""
    rng = SplitMix64(seed)
    results = []
    while True:
        res = apply_step(state,
                         random_actions(state, "P1", rng),
                         random_actions(state, "P2", rng))
        results.append(res)
        if res.done or len(results) >= max_steps + 5:
            return results, state
