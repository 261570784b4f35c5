"""microarena: a deterministic RTS micromanagement battle simulator with a
staged multimodal decision pipeline, an evaluation harness, and a
wire-protocol environment server."""

from .actions import Ability, Attack, MoveDir, MoveGrid, format_action
from .engine import (BattleState, EpisodeOutcome, StepResult, UnitState,
                     apply_step, builtin_opponent, check_termination,
                     compute_damage)
from .grid import cell_center, grid_of
from .knowledge import (KnowledgeEntry, KnowledgeStore,
                        build_knowledge_context, load_knowledge_base)
from .observe import Observation, UnitRecord, observe
from .parsing import (PriorityAssessment, RoleAssignment, SkillPlan,
                      parse_action_line, parse_action_lines)
from .pipeline import (ABLATION_GRID, AblationConfig, HistoryBuffer,
                       PipelineConfig, Transcript, run_episode)
from .backends import (RecordedBackend, RemoteChatBackend, ScriptedBackend,
                       make_backend)
from .render import RenderConfig, annotate_units, render_frame
from .describe import describe_state
from .scenarios import ScenarioSpec, instantiate, list_scenarios, load_scenario
from .units import UnitCatalog, UnitSpec, default_catalog, load_unit_specs

__version__ = "0.1.0"

__all__ = [
    "Ability", "Attack", "MoveDir", "MoveGrid", "format_action",
    "BattleState", "EpisodeOutcome", "StepResult", "UnitState",
    "apply_step", "builtin_opponent", "check_termination", "compute_damage",
    "cell_center", "grid_of",
    "KnowledgeEntry", "KnowledgeStore", "build_knowledge_context",
    "load_knowledge_base",
    "Observation", "UnitRecord", "observe",
    "PriorityAssessment", "RoleAssignment", "SkillPlan",
    "parse_action_line", "parse_action_lines",
    "ABLATION_GRID", "AblationConfig", "HistoryBuffer", "PipelineConfig",
    "Transcript", "run_episode",
    "RecordedBackend", "RemoteChatBackend", "ScriptedBackend", "make_backend",
    "RenderConfig", "annotate_units", "render_frame", "describe_state",
    "ScenarioSpec", "instantiate", "list_scenarios", "load_scenario",
    "UnitCatalog", "UnitSpec", "default_catalog", "load_unit_specs",
    "__version__",
]
