"""Action union: attack, grid/directional movement, ability casts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

DIRECTIONS = ("UP", "RIGHT", "DOWN", "LEFT")
GRID_MIN, GRID_MAX = 1, 10


@dataclass(frozen=True)
class Attack:
    actor: int
    target: int


@dataclass(frozen=True)
class MoveGrid:
    actor: int
    x: int
    y: int


@dataclass(frozen=True)
class MoveDir:
    actor: int
    direction: str  # UP | RIGHT | DOWN | LEFT


@dataclass(frozen=True)
class Ability:
    actor: int
    ability: str
    target_uid: int | None = None
    target_cell: tuple[int, int] | None = None


Action = Union[Attack, MoveGrid, MoveDir, Ability]
ActionSet = tuple  # ordered collection of Action


def format_action(action: Action) -> str:
    """Canonical one-line surface form (the inverse of parsing)."""
    if isinstance(action, Attack):
        return f"Attack {action.actor} {action.target}"
    if isinstance(action, MoveGrid):
        return f"Move {action.actor} {action.x} {action.y}"
    if isinstance(action, MoveDir):
        return f"Move {action.actor} {action.direction}"
    if isinstance(action, Ability):
        if action.target_uid is not None:
            return f"Ability {action.actor} {action.ability} {action.target_uid}"
        if action.target_cell is not None:
            cx, cy = action.target_cell
            return f"Ability {action.actor} {action.ability} {cx},{cy}"
        return f"Ability {action.actor} {action.ability}"
    raise TypeError(f"not an action: {action!r}")


def actor_of(action: Action) -> int:
    return action.actor
