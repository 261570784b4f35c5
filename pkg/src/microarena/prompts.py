"""Prompt-template loading and bundle assembly for the decision stages.

Templates are versioned files under ``data/prompts/`` with ``$slot``
insertion points (string.Template); assembled bundles are golden-matched
in tests, so template edits are deliberate, visible diffs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from string import Template

from .observe import Observation
from .parsing import ROLES, PriorityAssessment, RoleAssignment, SkillPlan

TEMPLATE_VERSION = 1

STAGE_PLAN = "Plan"
STAGE_ANALYZE = "Analyze"
STAGE_ROLE = "Role"
STAGE_ACT = "Act"
STAGE_SYNTHESIZE = "Synthesize"


@dataclass(frozen=True)
class PromptBundle:
    stage: str
    text: str
    image: bytes | None = None          # PNG; present iff backend is multimodal
    context: str | None = None          # knowledge context, when attached

    def image_digest(self) -> str | None:
        return hashlib.sha256(self.image).hexdigest() if self.image else None


_templates: dict[str, Template] = {}


def _template(name: str) -> Template:
    if name not in _templates:
        text = resources.files("microarena.data").joinpath(f"prompts/{name}.txt").read_text()
        _templates[name] = Template(text)
    return _templates[name]


def plan_to_json(plan: SkillPlan) -> str:
    return json.dumps({
        "primary_skill": {
            "name": plan.primary_skill.name,
            "description": plan.primary_skill.description,
            "steps": list(plan.primary_skill.steps),
        },
        "secondary_skills": [
            {"name": s.name, "description": s.description, "steps": list(s.steps)}
            for s in plan.secondary_skills
        ],
    }, indent=2)


def history_text(history) -> str:
    lines = [entry.summary for entry in history]
    return "\n".join(lines) if lines else "(no history yet)"


def annotations_text(obs: Observation) -> str:
    lines = []
    for a in obs.annotations:
        x0, y0, x1, y1 = a.b
        lines.append(f"tag {a.tag}: {a.c} at px ({a.p[0]},{a.p[1]}), box ({x0},{y0})-({x1},{y1})")
    return "\n".join(lines) if lines else "(none)"


def tactical_question(plan: SkillPlan) -> str:
    return (f"The army is executing '{plan.primary_skill.name}': "
            f"{plan.primary_skill.description} "
            f"Which enemy units should be engaged first to make that plan work, "
            f"and which enemy capabilities threaten it?")


def priorities_text(priorities: PriorityAssessment) -> str:
    lines = []
    for rank, e in enumerate(priorities, start=1):
        reason = f" - {e.reason}" if e.reason else ""
        lines.append(f"{rank}. {e.class_label} (Tag: {e.tag}){reason}")
    return "\n".join(lines) if lines else "(none)"


def roles_text(roles: RoleAssignment, friendly_uids) -> str:
    return "\n".join(f"{uid}: {roles.role_of(uid)}" for uid in friendly_uids) or "(none)"


def _image_for(obs: Observation, multimodal: bool) -> bytes | None:
    if not multimodal or obs.image is None:
        return None
    from .render import encode_png
    return encode_png(obs.image)


def build_plan_bundle(obs: Observation, history, team: str,
                      multimodal: bool) -> PromptBundle:
    text = _template("plan").substitute(
        team=team, observation=obs.text, history=history_text(history))
    return PromptBundle(STAGE_PLAN, text, image=_image_for(obs, multimodal))


def build_analyze_bundle(obs: Observation, history, plan: SkillPlan, team: str,
                         multimodal: bool) -> PromptBundle:
    text = _template("analyze").substitute(
        team=team, observation=obs.text, history=history_text(history),
        annotations=annotations_text(obs), plan=plan_to_json(plan),
        q=tactical_question(plan))
    return PromptBundle(STAGE_ANALYZE, text, image=_image_for(obs, multimodal))


def build_role_bundle(obs: Observation, team: str, multimodal: bool) -> PromptBundle:
    friendly = [r for r in obs.units if r.team == team]
    listing = "\n".join(f"{r.id}: {r.label}" for r in friendly) or "(none)"
    text = _template("role").substitute(
        team=team, observation=obs.text, friendly_units=listing,
        roles=", ".join(ROLES))
    return PromptBundle(STAGE_ROLE, text, image=_image_for(obs, multimodal))


def build_act_bundle(obs: Observation, history, team: str, multimodal: bool,
                     plan: SkillPlan | None = None,
                     priorities: PriorityAssessment | None = None,
                     knowledge: str | None = None,
                     roles: RoleAssignment | None = None) -> PromptBundle:
    plan_section = ""
    if plan is not None:
        plan_section = f"\n## Current skill plan\n{plan_to_json(plan)}\n"
    priority_section = ""
    if priorities is not None and len(priorities) > 0:
        priority_section = f"\n## Priority targets (rank order)\n{priorities_text(priorities)}\n"
    knowledge_section = ""
    if knowledge:
        knowledge_section = f"\n## Tactical knowledge\n{knowledge}\n"
    role_section = ""
    if roles is not None and roles.mapping:
        friendly = [r.id for r in obs.units if r.team == team]
        role_section = f"\n## Assigned roles\n{roles_text(roles, friendly)}\n"
    text = _template("act").substitute(
        team=team, observation=obs.text, history=history_text(history),
        plan_section=plan_section, priority_section=priority_section,
        knowledge_section=knowledge_section, role_section=role_section)
    return PromptBundle(STAGE_ACT, text, image=_image_for(obs, multimodal),
                        context=knowledge or None)


def build_synthesize_bundle(obs: Observation, team: str, multimodal: bool,
                            priorities: PriorityAssessment,
                            knowledge: str) -> PromptBundle:
    text = _template("synthesize").substitute(
        team=team, observation=obs.text,
        priorities=priorities_text(priorities), knowledge=knowledge)
    return PromptBundle(STAGE_SYNTHESIZE, text,
                        image=_image_for(obs, multimodal), context=knowledge)
