"""Observation assembly: annotated frame + text description + unit records.

Both teams' units are fully visible (no fog); the team argument only sets
the point of view in the text.  Everything here is a pure function of
(state, config).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .describe import describe_state, unit_labels
from .engine import BattleState
from .fixedpoint import fmt_us_seconds, milli_to_float
from .grid import grid_of
from .render import Annotation, RenderConfig, annotate_units, render_frame


@dataclass(frozen=True)
class UnitRecord:
    id: int
    type: str
    team: str
    label: str
    pos: tuple[float, float]            # world units
    grid: tuple[int, int]
    attr: dict
    status: dict


@dataclass(frozen=True)
class Observation:
    decision_step: int
    text: str
    units: tuple[UnitRecord, ...]
    annotations: tuple[Annotation, ...]
    image: np.ndarray | None            # (H, W, 3) uint8, None if not rendered
    height: int
    width: int


def unit_records(state: BattleState) -> tuple[UnitRecord, ...]:
    labels = unit_labels(state)
    records = []
    for u in state.living():
        spec = u.spec
        effects = []
        if u.stim_us > 0:
            effects.append(f"stimmed({fmt_us_seconds(u.stim_us)}s)")
        if u.sieged:
            effects.append("sieged")
        if u.transform_us > 0:
            effects.append(f"transforming({fmt_us_seconds(u.transform_us)}s)")
        if u.blink_cd_us > 0:
            effects.append(f"blink_cooldown({fmt_us_seconds(u.blink_cd_us)}s)")
        records.append(UnitRecord(
            id=u.uid,
            type=spec.class_name,
            team=u.team,
            label=labels[u.uid],
            pos=(milli_to_float(u.x), milli_to_float(u.y)),
            grid=grid_of(u.x, u.y, state.arena_w, state.arena_h),
            attr={
                "damage": milli_to_float(spec.attack_damage),
                "bonus_damage": milli_to_float(spec.bonus_damage),
                "bonus_vs": spec.bonus_vs,
                "armor": milli_to_float(spec.armor),
                "range": milli_to_float(spec.attack_range),
                "speed": milli_to_float(spec.movement_speed),
                "attributes": sorted(spec.attributes),
                "flying": spec.is_flying,
            },
            status={
                "health": milli_to_float(u.health),
                "max_health": milli_to_float(spec.max_health),
                "shields": milli_to_float(u.shields),
                "max_shields": milli_to_float(spec.max_shields),
                "energy": milli_to_float(u.energy),
                "max_energy": milli_to_float(spec.max_energy),
                "weapon_ready": u.weapon_ready,
                "effects": effects,
            },
        ))
    return tuple(records)


def observe(state: BattleState, team: str,
            config: RenderConfig | None = None,
            include_image: bool = True) -> Observation:
    """Compose the full observation for one team's point of view."""
    config = (config or RenderConfig()).validate()
    return Observation(
        decision_step=state.decision_step,
        text=describe_state(state, team),
        units=unit_records(state),
        annotations=tuple(annotate_units(state, config)),
        image=render_frame(state, config) if include_image else None,
        height=config.height,
        width=config.width,
    )
