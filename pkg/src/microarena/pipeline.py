"""The per-step decision loop: plan, analyze, retrieve, assign, act.

Every decision step runs up to five backend stages per controlled team:

  1. Plan       - skill plan for the step (always on)
  2. Analyze    - ranked enemy priorities (mpi_enabled)
  3. Retrieve   - knowledge lookups for the priority classes (rag_enabled)
  4. Role       - role assignment for friendly units (role_enabled)
  5. Act        - concrete orders, parsed and validated

Knowledge synthesis is folded into the Act prompt by default; setting
``separate_synthesize_stage`` restores a distinct Synthesize backend call
whose response replaces the raw knowledge context.

Each backend call is recorded in a transcript (stage, prompt, image digest,
response, latency), and each step appends an action/digest record to the
replay, so an episode is fully reconstructable and auditable.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field

from .actions import Action
from .backends import DecisionBackend
from .engine import (BattleState, EpisodeOutcome, apply_step,
                     builtin_opponent, check_termination)
from .errors import BackendUnavailable
from .fixedpoint import MAX_DECISION_STEPS, fmt_milli
from .knowledge import (DEFAULT_MAX_CONTEXT_CHARS, KnowledgeStore,
                        build_knowledge_context, load_knowledge_base)
from .observe import Observation, observe
from .parsing import (DEFAULT_PLAN, LineRejection, PriorityAssessment,
                      PriorityEntry, RoleAssignment, SkillPlan,
                      parse_action_lines, parse_priorities, parse_roles,
                      parse_skill_plan)
from .prompts import (PromptBundle, build_act_bundle, build_analyze_bundle,
                      build_plan_bundle, build_role_bundle,
                      build_synthesize_bundle)
from .render import RenderConfig
from .scenarios import instantiate, load_scenario
from .units import UnitCatalog, default_catalog

UNKNOWN_ACTOR = "UnknownActor"

_REPAIR_INSTRUCTION = (
    "\n\nYour previous reply could not be parsed. Answer again following the "
    "output format exactly, with no surrounding commentary.")


@dataclass(frozen=True)
class AblationConfig:
    """Stage toggles mirroring the three architecture components."""

    role_enabled: bool = True
    mpi_enabled: bool = True
    rag_enabled: bool = True

    def tag(self) -> str:
        return "".join(flag and letter or "-" for flag, letter in
                       ((self.role_enabled, "R"), (self.mpi_enabled, "M"),
                        (self.rag_enabled, "G")))


# The eight toggle rows in their canonical report order.
ABLATION_GRID = (
    AblationConfig(True, True, True),
    AblationConfig(True, True, False),
    AblationConfig(True, False, True),
    AblationConfig(False, True, True),
    AblationConfig(True, False, False),
    AblationConfig(False, True, False),
    AblationConfig(False, False, True),
    AblationConfig(False, False, False),
)


@dataclass(frozen=True)
class PipelineConfig:
    ablation: AblationConfig = AblationConfig()
    history_capacity: int = 5
    separate_synthesize_stage: bool = False
    max_context_chars: int = DEFAULT_MAX_CONTEXT_CHARS
    render: RenderConfig = RenderConfig()


@dataclass(frozen=True)
class HistoryEntry:
    decision_step: int
    summary: str
    actions: tuple[str, ...]
    reward: int


class HistoryBuffer:
    """Ring buffer of the last H steps (observation summary, actions, reward)."""

    def __init__(self, capacity: int = 5):
        self.capacity = capacity
        self._entries: deque[HistoryEntry] = deque(maxlen=capacity)

    def append(self, entry: HistoryEntry) -> None:
        self._entries.append(entry)

    def __iter__(self):
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)


@dataclass
class TranscriptCall:
    index: int
    stage: str
    prompt: str
    image_digest: str | None
    response: str
    latency_ms: float


@dataclass
class Transcript:
    """Ordered record of every backend call plus retrievals and events."""

    team: str
    backend_name: str = ""
    calls: list[TranscriptCall] = field(default_factory=list)
    retrievals: list[str] = field(default_factory=list)
    events: list[str] = field(default_factory=list)

    def stage_count(self, stage: str) -> int:
        return sum(1 for c in self.calls if c.stage == stage)

    def record(self, bundle: PromptBundle, response: str, latency_ms: float) -> None:
        self.calls.append(TranscriptCall(
            index=len(self.calls), stage=bundle.stage, prompt=bundle.text,
            image_digest=bundle.image_digest(), response=response,
            latency_ms=latency_ms))

    def to_records(self) -> list[dict]:
        return [{"index": c.index, "stage": c.stage, "prompt": c.prompt,
                 "image_digest": c.image_digest, "response": c.response,
                 "latency_ms": round(c.latency_ms, 3)} for c in self.calls]


def _query(backend: DecisionBackend, bundle: PromptBundle,
           transcript: Transcript) -> str:
    start = time.perf_counter()
    response = backend.query(bundle)
    transcript.record(bundle, response, (time.perf_counter() - start) * 1000.0)
    return response


# ---------------------------------------------------------------------------
# Stage operations


def plan_skills(obs: Observation, history: HistoryBuffer,
                backend: DecisionBackend, team: str,
                transcript: Transcript) -> SkillPlan:
    """Plan stage with one repair retry, then the stock focus-fire fallback."""
    bundle = build_plan_bundle(obs, history, team, backend.multimodal)
    response = _query(backend, bundle, transcript)
    plan = parse_skill_plan(response)
    if plan is not None:
        return plan
    repair = PromptBundle(bundle.stage, bundle.text + _REPAIR_INSTRUCTION,
                          image=bundle.image)
    response = _query(backend, repair, transcript)
    plan = parse_skill_plan(response)
    if plan is not None:
        return plan
    transcript.events.append("ParseFallback:Plan")
    return DEFAULT_PLAN


def analyze_priorities(obs: Observation, history: HistoryBuffer,
                       plan: SkillPlan, backend: DecisionBackend, team: str,
                       transcript: Transcript) -> PriorityAssessment:
    """Analyze stage; entries whose tag is not a living enemy are dropped."""
    bundle = build_analyze_bundle(obs, history, plan, team, backend.multimodal)
    response = _query(backend, bundle, transcript)
    enemy_by_uid = {r.id: r for r in obs.units if r.team != team}
    entries = []
    for raw in parse_priorities(response):
        record = enemy_by_uid.get(raw.tag)
        if record is None:
            transcript.events.append(f"DroppedPriorityTag:{raw.tag}")
            continue
        entries.append(PriorityEntry(class_label=raw.class_label, tag=raw.tag,
                                     reason=raw.reason, class_name=record.type))
    if not entries:
        transcript.events.append("EmptyAssessment")
    return PriorityAssessment(tuple(entries))


def assign_roles(obs: Observation, backend: DecisionBackend, team: str,
                 transcript: Transcript) -> RoleAssignment:
    """Role stage; units the response leaves out default to Assault."""
    bundle = build_role_bundle(obs, team, backend.multimodal)
    response = _query(backend, bundle, transcript)
    friendly = {r.id for r in obs.units if r.team == team}
    mapping = {uid: role for uid, role in parse_roles(response).items()
               if uid in friendly}
    return RoleAssignment(mapping)


def retrieve_knowledge(priorities: PriorityAssessment, obs: Observation,
                       team: str, store: KnowledgeStore,
                       transcript: Transcript,
                       max_context_chars: int) -> str:
    """Retrieve stage: knowledge blocks for the priority classes.

    With no priorities available (analysis off or empty) the lookup falls
    back to every living enemy class, so knowledge still informs the step.
    """
    if len(priorities) > 0:
        classes = [e.class_name for e in priorities]
    else:
        classes = [r.type for r in obs.units if r.team != team]
    ordered: list[str] = []
    for cls in classes:
        if cls not in ordered:
            ordered.append(cls)
            transcript.retrievals.append(cls)
    return build_knowledge_context(ordered, store, max_context_chars)


def generate_actions(obs: Observation, plan: SkillPlan | None,
                     priorities: PriorityAssessment | None,
                     knowledge_context: str | None,
                     roles: RoleAssignment | None,
                     history: HistoryBuffer, backend: DecisionBackend,
                     team: str, transcript: Transcript,
                     ) -> tuple[list[Action], list[LineRejection]]:
    """Act stage: parse order lines, drop invalid ones with a report."""
    bundle = build_act_bundle(obs, history, team, backend.multimodal,
                              plan=plan, priorities=priorities,
                              knowledge=knowledge_context, roles=roles)
    response = _query(backend, bundle, transcript)
    actions, rejections = parse_action_lines(response)
    friendly = {r.id for r in obs.units if r.team == team}
    valid: list[Action] = []
    for action in actions:
        if action.actor not in friendly:
            rejections.append(LineRejection(
                line=str(action), reason=UNKNOWN_ACTOR,
                detail=f"uid {action.actor} is not a living friendly unit"))
            continue
        valid.append(action)
    if not valid and response.strip():
        transcript.events.append("AllLinesInvalid")
    return valid, rejections


# ---------------------------------------------------------------------------
# Episode driver


@dataclass
class EpisodeRun:
    scenario_id: str
    seed: int
    reward: int
    outcome: EpisodeOutcome
    steps: int
    transcripts: dict[str, Transcript]
    replay: list[dict]
    final_state: BattleState


class TeamPipeline:
    """Stage state for one controlled team within an episode."""

    def __init__(self, team: str, backend: DecisionBackend,
                 config: PipelineConfig, store: KnowledgeStore):
        self.team = team
        self.backend = backend
        self.config = config
        self.store = store
        self.history = HistoryBuffer(config.history_capacity)
        self.transcript = Transcript(team=team,
                                     backend_name=type(backend).__name__)

    def decide(self, state: BattleState) -> tuple[list[Action], list[LineRejection], Observation]:
        ab = self.config.ablation
        obs = observe(state, self.team, self.config.render,
                      include_image=self.backend.multimodal)
        plan = plan_skills(obs, self.history, self.backend, self.team,
                           self.transcript)
        priorities = None
        if ab.mpi_enabled:
            priorities = analyze_priorities(obs, self.history, plan,
                                            self.backend, self.team,
                                            self.transcript)
        knowledge = None
        if ab.rag_enabled:
            knowledge = retrieve_knowledge(
                priorities if priorities is not None else PriorityAssessment(),
                obs, self.team, self.store, self.transcript,
                self.config.max_context_chars)
            if self.config.separate_synthesize_stage and knowledge:
                bundle = build_synthesize_bundle(
                    obs, self.team, self.backend.multimodal,
                    priorities if priorities is not None else PriorityAssessment(),
                    knowledge)
                knowledge = _query(self.backend, bundle, self.transcript)
        roles = None
        if ab.role_enabled:
            roles = assign_roles(obs, self.backend, self.team, self.transcript)
        actions, rejections = generate_actions(
            obs, plan, priorities, knowledge, roles, self.history,
            self.backend, self.team, self.transcript)
        return actions, rejections, obs

    def record_step(self, state: BattleState, actions: list[Action],
                    reward: int) -> None:
        from .actions import format_action
        lines = tuple(format_action(a) for a in actions)
        p1 = sum(1 for u in state.living("P1"))
        p2 = sum(1 for u in state.living("P2"))
        hp1 = sum(u.health + u.shields for u in state.living("P1"))
        hp2 = sum(u.health + u.shields for u in state.living("P2"))
        issued = "; ".join(lines) if lines else "(none)"
        summary = (f"step {state.decision_step}: P1 {p1} units "
                   f"(pool {fmt_milli(hp1)}), P2 {p2} units "
                   f"(pool {fmt_milli(hp2)}); issued: {issued}; reward {reward}")
        self.history.append(HistoryEntry(
            decision_step=state.decision_step, summary=summary,
            actions=lines, reward=reward))


def run_episode(scenario_id: str, seed: int, backend_p1: DecisionBackend,
                backend_p2: DecisionBackend | None = None,
                ablation: AblationConfig | None = None,
                config: PipelineConfig | None = None,
                catalog: UnitCatalog | None = None,
                store: KnowledgeStore | None = None,
                max_steps: int = MAX_DECISION_STEPS) -> EpisodeRun:
    """Run one full episode; P2 falls back to the builtin opponent.

    Deterministic backends make this a pure function of
    (scenario, seed, ablation).  On backend failure the partial transcript
    is preserved on the raised BackendUnavailable.
    """
    catalog = catalog or default_catalog()
    store = store or load_knowledge_base(catalog=catalog)
    if config is None:
        config = PipelineConfig(ablation=ablation or AblationConfig())
    elif ablation is not None:
        config = PipelineConfig(ablation=ablation,
                                history_capacity=config.history_capacity,
                                separate_synthesize_stage=config.separate_synthesize_stage,
                                max_context_chars=config.max_context_chars,
                                render=config.render)

    scenario = load_scenario(scenario_id, catalog)
    state = instantiate(scenario, seed, catalog)

    pipelines = {"P1": TeamPipeline("P1", backend_p1, config, store)}
    if backend_p2 is not None:
        pipelines["P2"] = TeamPipeline("P2", backend_p2, config, store)
    transcripts = {team: p.transcript for team, p in pipelines.items()}

    replay: list[dict] = [{
        "kind": "replay", "version": 1, "scenario": scenario_id, "seed": seed,
        "ablation": {"role": config.ablation.role_enabled,
                     "mpi": config.ablation.mpi_enabled,
                     "rag": config.ablation.rag_enabled},
        "initial_digest": state.digest(),
    }]

    total_reward = 0
    steps = 0
    outcome = check_termination(state)
    try:
        while outcome.result == "Ongoing" and steps < max_steps:
            team_actions: dict[str, list[Action]] = {}
            parse_rejections: list[dict] = []
            for team in ("P1", "P2"):
                if team in pipelines:
                    actions, rejections, _ = pipelines[team].decide(state)
                    team_actions[team] = actions
                    parse_rejections.extend(
                        {"team": team, "line": r.line, "reason": r.reason,
                         "detail": r.detail} for r in rejections)
                else:
                    team_actions[team] = list(builtin_opponent(state, team))

            result = apply_step(state, team_actions["P1"], team_actions["P2"])
            steps += 1
            total_reward += result.reward
            outcome = result.outcome

            from .actions import format_action
            replay.append({
                "step": state.decision_step,
                "digest": state.digest(),
                "p1": [format_action(a) for a in team_actions["P1"]],
                "p2": [format_action(a) for a in team_actions["P2"]],
                "rejections": parse_rejections + [
                    {"team": r.team, "line": format_action(r.action),
                     "reason": r.reason, "detail": r.detail}
                    for r in result.rejections],
                "reward": result.reward,
                "done": result.done,
            })
            for team, pipeline in pipelines.items():
                signed = result.reward if team == "P1" else -result.reward
                pipeline.record_step(state, team_actions[team], signed)
            if result.done:
                break
    except BackendUnavailable as exc:
        exc.transcript = transcripts
        raise

    return EpisodeRun(scenario_id=scenario_id, seed=seed, reward=total_reward,
                      outcome=outcome, steps=steps, transcripts=transcripts,
                      replay=replay, final_state=state)
