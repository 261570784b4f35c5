"""Parsers for decision-backend output.

Everything here is total: any input yields either a value or a typed
rejection, never an exception.  Grammars are line-oriented and
whitespace-tolerant; lines that match nothing are skipped (model output
routinely interleaves prose with structure).

Action line grammar (case-insensitive verbs, canonical form shown):

    Attack <uid> <uid>
    Move <uid> <x> <y>          with x, y in 1..10
    Move <uid> <UP|RIGHT|DOWN|LEFT>
    Ability <uid> <name> [<uid> | <x>,<y>]
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .actions import (Ability, Action, Attack, DIRECTIONS, GRID_MAX, GRID_MIN,
                      MoveDir, MoveGrid, format_action)

# Rejection reasons for action lines.
BAD_VERB = "BadVerb"
BAD_ARITY = "BadArity"
BAD_NUMBER = "BadNumber"
OUT_OF_GRID = "OutOfGrid"
BAD_DIRECTION = "BadDirection"


@dataclass(frozen=True)
class LineRejection:
    line: str
    reason: str
    detail: str = ""


@dataclass(frozen=True)
class Skill:
    name: str
    description: str = ""
    steps: tuple[str, ...] = ()


@dataclass(frozen=True)
class SkillPlan:
    primary_skill: Skill
    secondary_skills: tuple[Skill, ...] = ()


DEFAULT_PLAN = SkillPlan(
    primary_skill=Skill(
        name="Focus Fire",
        description="Concentrate the army's attacks to remove one enemy at a time.",
        steps=("Pick the weakest reachable enemy unit",
               "Order every armed unit to attack that same target",
               "Re-evaluate after each kill"),
    ),
    secondary_skills=(
        Skill(name="Hold Formation",
              description="Keep the army together so no unit is picked off alone.",
              steps=("Move stragglers toward the army center",)),
    ),
)


@dataclass(frozen=True)
class PriorityEntry:
    class_label: str            # label text as written, e.g. "Marine_1"
    tag: int                    # uid; the authoritative reference
    reason: str = ""
    class_name: str = ""        # resolved unit class, filled by the caller


@dataclass(frozen=True)
class PriorityAssessment:
    entries: tuple[PriorityEntry, ...] = ()

    def tags(self) -> tuple[int, ...]:
        return tuple(e.tag for e in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


ROLES = ("Assault", "Skirmisher", "Protector", "Support")
DEFAULT_ROLE = "Assault"


@dataclass(frozen=True)
class RoleAssignment:
    mapping: dict[int, str] = field(default_factory=dict)

    def role_of(self, uid: int) -> str:
        return self.mapping.get(uid, DEFAULT_ROLE)


# ---------------------------------------------------------------------------
# Action lines


def parse_action_line(line: str) -> Action | LineRejection:
    """Parse one action line; returns an Action or a typed LineRejection."""
    tokens = line.split()
    if not tokens:
        return LineRejection(line, BAD_VERB, "empty line")
    verb = tokens[0].lower()
    args = tokens[1:]

    if verb == "attack":
        if len(args) != 2:
            return LineRejection(line, BAD_ARITY, "Attack takes 2 arguments")
        try:
            actor, target = int(args[0]), int(args[1])
        except ValueError:
            return LineRejection(line, BAD_NUMBER, "uids must be integers")
        return Attack(actor, target)

    if verb == "move":
        if len(args) == 2:
            try:
                actor = int(args[0])
            except ValueError:
                return LineRejection(line, BAD_NUMBER, "uid must be an integer")
            direction = args[1].upper()
            if direction not in DIRECTIONS:
                return LineRejection(line, BAD_DIRECTION, f"unknown direction {args[1]!r}")
            return MoveDir(actor, direction)
        if len(args) == 3:
            try:
                actor, x, y = int(args[0]), int(args[1]), int(args[2])
            except ValueError:
                return LineRejection(line, BAD_NUMBER, "uid and coordinates must be integers")
            if not (GRID_MIN <= x <= GRID_MAX and GRID_MIN <= y <= GRID_MAX):
                return LineRejection(line, OUT_OF_GRID, f"({x},{y}) outside 1..10")
            return MoveGrid(actor, x, y)
        return LineRejection(line, BAD_ARITY, "Move takes 2 or 3 arguments")

    if verb == "ability":
        if len(args) not in (2, 3):
            return LineRejection(line, BAD_ARITY, "Ability takes 2 or 3 arguments")
        try:
            actor = int(args[0])
        except ValueError:
            return LineRejection(line, BAD_NUMBER, "uid must be an integer")
        name = args[1]
        if len(args) == 2:
            return Ability(actor, name)
        target = args[2]
        if "," in target:
            parts = target.split(",")
            if len(parts) != 2:
                return LineRejection(line, BAD_NUMBER, "cell target must be x,y")
            try:
                cx, cy = int(parts[0]), int(parts[1])
            except ValueError:
                return LineRejection(line, BAD_NUMBER, "cell coordinates must be integers")
            if not (GRID_MIN <= cx <= GRID_MAX and GRID_MIN <= cy <= GRID_MAX):
                return LineRejection(line, OUT_OF_GRID, f"({cx},{cy}) outside 1..10")
            return Ability(actor, name, target_cell=(cx, cy))
        try:
            tuid = int(target)
        except ValueError:
            return LineRejection(line, BAD_NUMBER, "target must be a uid or x,y cell")
        return Ability(actor, name, target_uid=tuid)

    return LineRejection(line, BAD_VERB, f"unknown verb {tokens[0]!r}")


def parse_action_lines(text: str) -> tuple[list[Action], list[LineRejection]]:
    """Parse a whole response: one action per non-empty line.

    Lines failing the grammar become rejections; at most one action per
    actor survives (first wins, duplicates are rejected).
    """
    actions: list[Action] = []
    rejections: list[LineRejection] = []
    seen: set[int] = set()
    for raw in text.splitlines():
        line = raw.strip().strip("`")
        if not line:
            continue
        result = parse_action_line(line)
        if isinstance(result, LineRejection):
            if result.reason == BAD_VERB and result.detail.startswith("unknown verb"):
                continue  # prose line, not an attempted action
            rejections.append(result)
        elif result.actor in seen:
            rejections.append(LineRejection(line, BAD_ARITY, "duplicate actor"))
        else:
            actions.append(result)
            seen.add(result.actor)
    return actions, rejections


def format_actions(actions) -> str:
    return "\n".join(format_action(a) for a in actions)


# ---------------------------------------------------------------------------
# Skill plan (JSON object, possibly wrapped in prose or code fences)


def _extract_json_object(text: str) -> str | None:
    start = text.find("{")
    if start < 0:
        return None
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return text[start:i + 1]
    return None


def _parse_skill(raw) -> Skill | None:
    if not isinstance(raw, dict):
        return None
    name = raw.get("name")
    if not isinstance(name, str) or not name.strip():
        return None
    steps = raw.get("steps", [])
    if not isinstance(steps, list):
        steps = []
    return Skill(
        name=name.strip(),
        description=str(raw.get("description", "")),
        steps=tuple(str(s) for s in steps),
    )


def parse_skill_plan(text: str) -> SkillPlan | None:
    """Extract the plan object; None when the response has no usable plan."""
    payload = _extract_json_object(text)
    if payload is None:
        return None
    try:
        obj = json.loads(payload)
    except json.JSONDecodeError:
        return None
    if not isinstance(obj, dict):
        return None
    primary = _parse_skill(obj.get("primary_skill"))
    if primary is None or not primary.steps:
        return None
    secondary = []
    raw_secondary = obj.get("secondary_skills", [])
    if isinstance(raw_secondary, list):
        for raw in raw_secondary:
            skill = _parse_skill(raw)
            if skill is not None:
                secondary.append(skill)
    return SkillPlan(primary_skill=primary, secondary_skills=tuple(secondary))


# ---------------------------------------------------------------------------
# Priority assessment:  Unit: <Label> (Tag: <n>)  /  Reason: <text>

_UNIT_RE = re.compile(r"Unit:\s*(?P<label>\S+)\s*\(\s*Tag:\s*(?P<tag>\d+)\s*\)",
                      re.IGNORECASE)
_REASON_RE = re.compile(r"Reason:\s*(?P<reason>.+)", re.IGNORECASE)


def parse_priorities(text: str) -> list[PriorityEntry]:
    """Parse ranked target entries in response order; tags deduplicated
    (first occurrence keeps its rank)."""
    entries: list[PriorityEntry] = []
    seen: set[int] = set()
    pending: PriorityEntry | None = None
    for raw in text.splitlines():
        m = _UNIT_RE.search(raw)
        if m:
            if pending is not None:
                entries.append(pending)
            tag = int(m.group("tag"))
            if tag in seen:
                pending = None
                continue
            seen.add(tag)
            pending = PriorityEntry(class_label=m.group("label"), tag=tag)
            continue
        m = _REASON_RE.search(raw)
        if m and pending is not None:
            pending = PriorityEntry(class_label=pending.class_label,
                                    tag=pending.tag,
                                    reason=m.group("reason").strip())
            entries.append(pending)
            pending = None
    if pending is not None:
        entries.append(pending)
    return entries


# ---------------------------------------------------------------------------
# Role lines:  Role: <uid> -> <role>

_ROLE_RE = re.compile(r"Role:\s*(?P<uid>\d+)\s*->\s*(?P<role>[A-Za-z]+)",
                      re.IGNORECASE)
_ROLE_BY_LOWER = {r.lower(): r for r in ROLES}


def parse_roles(text: str) -> dict[int, str]:
    """uid -> role for every well-formed line; unknown role names skipped."""
    mapping: dict[int, str] = {}
    for raw in text.splitlines():
        m = _ROLE_RE.search(raw)
        if not m:
            continue
        role = _ROLE_BY_LOWER.get(m.group("role").lower())
        if role is None:
            continue
        uid = int(m.group("uid"))
        if uid not in mapping:
            mapping[uid] = role
    return mapping
