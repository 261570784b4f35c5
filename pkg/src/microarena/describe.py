"""Deterministic natural-language battlefield description.

The template is fixed and regenerates identically from the same state
(golden files in tests pin it).  One line per living unit:

    <Class>_<idx> (Tag: <uid>) at grid (x,y), HP h/max[, shields s/max]
    [, energy e/max], weapon ready|cooling[, effects: ...]

Labels index units of the same class within a team by ascending uid,
starting at 1.
"""

from __future__ import annotations

from .engine import BattleState, UnitState
from .fixedpoint import fmt_milli, fmt_us_seconds
from .grid import grid_of


def unit_labels(state: BattleState) -> dict[int, str]:
    """uid -> "Class_idx" label, per-team per-class, uid order."""
    labels: dict[int, str] = {}
    counters: dict[tuple[str, str], int] = {}
    for uid in sorted(state.units):
        u = state.units[uid]
        key = (u.team, u.spec.class_name)
        counters[key] = counters.get(key, 0) + 1
        labels[uid] = f"{u.spec.class_name}_{counters[key]}"
    return labels


def _effect_text(u: UnitState) -> str:
    parts = []
    if u.stim_us > 0:
        parts.append(f"stimmed({fmt_us_seconds(u.stim_us)}s)")
    if u.sieged:
        parts.append("sieged")
    if u.transform_us > 0:
        parts.append(f"transforming({fmt_us_seconds(u.transform_us)}s)")
    if u.blink_cd_us > 0:
        parts.append(f"blink_cooldown({fmt_us_seconds(u.blink_cd_us)}s)")
    return ", ".join(parts)


def unit_line(state: BattleState, u: UnitState, label: str) -> str:
    gx, gy = grid_of(u.x, u.y, state.arena_w, state.arena_h)
    parts = [
        f"{label} (Tag: {u.uid}) at grid ({gx},{gy})",
        f"HP {fmt_milli(u.health)}/{fmt_milli(u.spec.max_health)}",
    ]
    if u.spec.max_shields > 0:
        parts.append(f"shields {fmt_milli(u.shields)}/{fmt_milli(u.spec.max_shields)}")
    if u.spec.max_energy > 0:
        parts.append(f"energy {fmt_milli(u.energy)}/{fmt_milli(u.spec.max_energy)}")
    parts.append("weapon ready" if u.weapon_ready else "weapon cooling")
    effects = _effect_text(u)
    if effects:
        parts.append(f"effects: {effects}")
    return ", ".join(parts)


def describe_state(state: BattleState, team: str) -> str:
    labels = unit_labels(state)
    p1 = list(state.living("P1"))
    p2 = list(state.living("P2"))
    lines = [
        f"Decision step {state.decision_step}/600. You are {team}. "
        f"P1 army: {len(p1)} units. P2 army: {len(p2)} units.",
    ]
    for name, group in (("P1", p1), ("P2", p2)):
        lines.append(f"[{name} units]")
        if not group:
            lines.append("(none)")
        for u in group:
            lines.append(unit_line(state, u, labels[u.uid]))
    return "\n".join(lines)
