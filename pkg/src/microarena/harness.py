"""Batch evaluation: win-rate runs, ablation sweeps, head-to-head matches.

Seed discipline: episode i in a run uses ``seed_base + i``; in head-to-head
play the two games of a side-swap pair share a seed so spawn-position bias
cancels.  Episodes execute in a thread pool; reports are assembled in seed
order regardless of completion order, so identical configurations produce
identical reports with deterministic backends.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .backends import make_backend
from .errors import BackendUnavailable, MicroArenaError
from .pipeline import ABLATION_GRID, AblationConfig, PipelineConfig, run_episode
from .replay import write_replay
from .scenarios import list_scenarios

BUILTIN = "builtin"


@dataclass(frozen=True)
class EpisodeResult:
    scenario: str
    seed: int
    outcome: str                     # Victory | Defeat | Draw | Error
    steps: int
    reward: int
    transcript_digest: str = ""
    replay_path: str = ""
    error: str = ""


@dataclass
class ScenarioRow:
    scenario: str
    episodes: int = 0
    wins: int = 0
    losses: int = 0
    draws: int = 0
    errors: int = 0
    results: list[EpisodeResult] = field(default_factory=list)

    @property
    def win_rate(self) -> float:
        return self.wins / self.episodes if self.episodes else 0.0

    def add(self, result: EpisodeResult) -> None:
        self.episodes += 1
        self.results.append(result)
        if result.outcome == "Victory":
            self.wins += 1
        elif result.outcome == "Defeat":
            self.losses += 1
        elif result.outcome == "Draw":
            self.draws += 1
        else:
            self.errors += 1


@dataclass
class WinRateReport:
    rows: list[ScenarioRow]
    config: dict

    @property
    def aggregate(self) -> float:
        return (sum(r.win_rate for r in self.rows) / len(self.rows)
                if self.rows else 0.0)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "rows": [{
                "scenario": r.scenario, "episodes": r.episodes,
                "wins": r.wins, "losses": r.losses, "draws": r.draws,
                "errors": r.errors, "win_rate": r.win_rate,
                "results": [{
                    "seed": e.seed, "outcome": e.outcome, "steps": e.steps,
                    "reward": e.reward, "transcript_digest": e.transcript_digest,
                    "replay": e.replay_path, "error": e.error,
                } for e in r.results],
            } for r in self.rows],
            "average_win_rate": self.aggregate,
        }

    def text_table(self) -> str:
        width = max([len("Map Scenario")] + [len(r.scenario) for r in self.rows]) + 2
        lines = [f"{'Map Scenario':<{width}}{'Win Rate (%)':>14}", "-" * (width + 14)]
        for r in self.rows:
            lines.append(f"{r.scenario:<{width}}{100 * r.win_rate:>14.1f}")
        lines.append("-" * (width + 14))
        lines.append(f"{'Average Win Rate':<{width}}{100 * self.aggregate:>14.1f}")
        return "\n".join(lines)


def _transcript_digest(transcripts) -> str:
    # Hash the decision content only; latency is measurement, not decision.
    h = hashlib.sha256()
    for team in sorted(transcripts):
        for call in transcripts[team].calls:
            h.update(json.dumps(
                [team, call.index, call.stage, call.prompt,
                 call.image_digest, call.response]).encode())
        h.update(json.dumps(transcripts[team].retrievals).encode())
    return h.hexdigest()


def _run_one(scenario: str, seed: int, backend_spec: str, opponent_spec: str,
             ablation: AblationConfig, config: PipelineConfig | None,
             replay_dir: Path | None) -> EpisodeResult:
    try:
        backend_p1 = make_backend(backend_spec, seed=seed)
        backend_p2 = (None if opponent_spec == BUILTIN
                      else make_backend(opponent_spec, seed=seed + 0x5EED))
        run = run_episode(scenario, seed, backend_p1, backend_p2,
                          ablation=ablation, config=config)
        replay_path = ""
        if replay_dir is not None:
            replay_dir.mkdir(parents=True, exist_ok=True)
            path = replay_dir / f"{scenario}_{seed}.jsonl"
            write_replay(path, run.replay)
            replay_path = str(path)
        return EpisodeResult(
            scenario=scenario, seed=seed, outcome=run.outcome.result,
            steps=run.steps, reward=run.reward,
            transcript_digest=_transcript_digest(run.transcripts),
            replay_path=replay_path)
    except (BackendUnavailable, MicroArenaError, ValueError) as exc:
        return EpisodeResult(scenario=scenario, seed=seed, outcome="Error",
                             steps=0, reward=0, error=str(exc))


def cmd_run(scenarios, backend_spec: str, episodes: int, seed_base: int,
            opponent_spec: str = BUILTIN,
            ablation: AblationConfig | None = None,
            config: PipelineConfig | None = None,
            replay_dir: str | Path | None = None,
            workers: int = 4) -> WinRateReport:
    """Win-rate run: ``episodes`` seeded episodes per scenario."""
    if scenarios in ("all", ["all"]):
        scenarios = [sid for sid, _, _ in list_scenarios()]
    elif isinstance(scenarios, str):
        scenarios = [scenarios]
    ablation = ablation or AblationConfig()
    replay_dir = Path(replay_dir) if replay_dir else None

    rows = []
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for scenario in scenarios:
            futures = [
                pool.submit(_run_one, scenario, seed_base + i, backend_spec,
                            opponent_spec, ablation, config, replay_dir)
                for i in range(episodes)
            ]
            row = ScenarioRow(scenario=scenario)
            for future in futures:        # submission order == seed order
                row.add(future.result())
            rows.append(row)
    return WinRateReport(rows=rows, config={
        "backend": backend_spec, "opponent": opponent_spec,
        "episodes": episodes, "seed_base": seed_base,
        "ablation": ablation.tag(),
    })


@dataclass
class AblationRow:
    ablation: AblationConfig
    report: WinRateReport
    analyze_calls: int
    role_calls: int
    retrievals: int


@dataclass
class AblationReport:
    scenario: str
    rows: list[AblationRow]
    config: dict

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "config": self.config,
            "rows": [{
                "role": r.ablation.role_enabled, "mpi": r.ablation.mpi_enabled,
                "rag": r.ablation.rag_enabled,
                "win_rate": r.report.rows[0].win_rate,
                "episodes": r.report.rows[0].episodes,
                "analyze_calls": r.analyze_calls,
                "role_calls": r.role_calls,
                "retrievals": r.retrievals,
            } for r in self.rows],
        }

    def text_table(self) -> str:
        lines = [f"{'Role':^6}{'MPI':^6}{'RAG':^6}{'Win Rate (%)':>14}",
                 "-" * 32]
        for r in self.rows:
            def mark(flag: bool) -> str:
                return "x" if flag else "-"
            lines.append(f"{mark(r.ablation.role_enabled):^6}"
                         f"{mark(r.ablation.mpi_enabled):^6}"
                         f"{mark(r.ablation.rag_enabled):^6}"
                         f"{100 * r.report.rows[0].win_rate:>14.1f}")
        return "\n".join(lines)


def cmd_ablate(scenario: str, backend_spec: str, episodes: int,
               seed_base: int, opponent_spec: str = BUILTIN,
               config: PipelineConfig | None = None,
               grid=ABLATION_GRID, workers: int = 4) -> AblationReport:
    """One row per stage-toggle combination, canonical order.

    Per row the report carries transcript stage counts summed over its
    episodes, so toggle gating is auditable from the report alone.
    """
    rows = []
    for ablation in grid:
        counters = {"analyze": 0, "role": 0, "retrievals": 0}

        def run_with_counters(seed: int, ablation=ablation, counters=counters):
            backend_p1 = make_backend(backend_spec, seed=seed)
            backend_p2 = (None if opponent_spec == BUILTIN
                          else make_backend(opponent_spec, seed=seed + 0x5EED))
            run = run_episode(scenario, seed, backend_p1, backend_p2,
                              ablation=ablation, config=config)
            for transcript in run.transcripts.values():
                counters["analyze"] += transcript.stage_count("Analyze")
                counters["role"] += transcript.stage_count("Role")
                counters["retrievals"] += len(transcript.retrievals)
            return EpisodeResult(
                scenario=scenario, seed=seed, outcome=run.outcome.result,
                steps=run.steps, reward=run.reward,
                transcript_digest=_transcript_digest(run.transcripts))

        row = ScenarioRow(scenario=scenario)
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            futures = [pool.submit(run_with_counters, seed_base + i)
                       for i in range(episodes)]
            for future in futures:
                try:
                    row.add(future.result())
                except (BackendUnavailable, MicroArenaError, ValueError) as exc:
                    row.add(EpisodeResult(scenario=scenario, seed=-1,
                                          outcome="Error", steps=0, reward=0,
                                          error=str(exc)))
        report = WinRateReport(rows=[row], config={"ablation": ablation.tag()})
        rows.append(AblationRow(ablation=ablation, report=report,
                                analyze_calls=counters["analyze"],
                                role_calls=counters["role"],
                                retrievals=counters["retrievals"]))
    return AblationReport(scenario=scenario, rows=rows, config={
        "backend": backend_spec, "opponent": opponent_spec,
        "episodes": episodes, "seed_base": seed_base,
    })


@dataclass
class PvpReport:
    scenario: str
    backend_a: str
    backend_b: str
    matches: int
    a_wins: int
    b_wins: int
    draws: int
    errors: int
    results: list[EpisodeResult]

    @property
    def record(self) -> str:
        """Head-to-head cell format, e.g. '13:7'."""
        return f"{self.a_wins}:{self.b_wins}"

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario, "backend_a": self.backend_a,
            "backend_b": self.backend_b, "matches": self.matches,
            "record": self.record, "a_wins": self.a_wins,
            "b_wins": self.b_wins, "draws": self.draws, "errors": self.errors,
        }

    def text_table(self) -> str:
        return (f"{self.backend_a} vs {self.backend_b} on {self.scenario}: "
                f"{self.record} ({self.draws} draws, {self.errors} errors, "
                f"{self.matches} matches)")


def cmd_pvp(scenario: str, backend_a: str, backend_b: str, matches: int,
            seed_base: int = 0, ablation: AblationConfig | None = None,
            config: PipelineConfig | None = None,
            workers: int = 4) -> PvpReport:
    """Head-to-head: sides alternate every match; a side-swap pair shares a
    seed so spawn bias cancels."""
    ablation = ablation or AblationConfig()

    def run_match(index: int) -> tuple[EpisodeResult, str]:
        seed = seed_base + index // 2
        a_plays_p1 = index % 2 == 0
        spec_p1 = backend_a if a_plays_p1 else backend_b
        spec_p2 = backend_b if a_plays_p1 else backend_a
        try:
            run = run_episode(scenario, seed,
                              make_backend(spec_p1, seed=seed),
                              make_backend(spec_p2, seed=seed + 0x5EED),
                              ablation=ablation, config=config)
            result = EpisodeResult(scenario=scenario, seed=seed,
                                   outcome=run.outcome.result, steps=run.steps,
                                   reward=run.reward,
                                   transcript_digest=_transcript_digest(run.transcripts))
            if run.outcome.result == "Victory":
                winner = "a" if a_plays_p1 else "b"
            elif run.outcome.result == "Defeat":
                winner = "b" if a_plays_p1 else "a"
            else:
                winner = "draw"
            return result, winner
        except (BackendUnavailable, MicroArenaError, ValueError) as exc:
            return EpisodeResult(scenario=scenario, seed=seed, outcome="Error",
                                 steps=0, reward=0, error=str(exc)), "error"

    a_wins = b_wins = draws = errors = 0
    results = []
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for result, winner in pool.map(run_match, range(matches)):
            results.append(result)
            if winner == "a":
                a_wins += 1
            elif winner == "b":
                b_wins += 1
            elif winner == "draw":
                draws += 1
            else:
                errors += 1
    return PvpReport(scenario=scenario, backend_a=backend_a,
                     backend_b=backend_b, matches=matches, a_wins=a_wins,
                     b_wins=b_wins, draws=draws, errors=errors,
                     results=results)


def dry_run_prompts(scenario_id: str, seed: int,
                    ablation: AblationConfig | None = None,
                    config: PipelineConfig | None = None,
                    multimodal: bool = False) -> list[tuple[str, str]]:
    """Assemble the first decision step's prompts without touching any
    backend or network: (stage, prompt text) pairs in pipeline order.

    Stages that depend on earlier model output are previewed with the
    stock plan and the whole-enemy-roster knowledge fallback.
    """
    from .knowledge import build_knowledge_context, load_knowledge_base
    from .observe import observe
    from .parsing import DEFAULT_PLAN, PriorityAssessment
    from .pipeline import HistoryBuffer
    from .prompts import (build_act_bundle, build_analyze_bundle,
                          build_plan_bundle, build_role_bundle)
    from .scenarios import instantiate, load_scenario

    ablation = ablation or AblationConfig()
    config = config or PipelineConfig(ablation=ablation)
    state = instantiate(load_scenario(scenario_id), seed)
    obs = observe(state, "P1", config.render, include_image=multimodal)
    history = HistoryBuffer(config.history_capacity)

    bundles = [build_plan_bundle(obs, history, "P1", multimodal)]
    if ablation.mpi_enabled:
        bundles.append(build_analyze_bundle(obs, history, DEFAULT_PLAN, "P1",
                                            multimodal))
    knowledge = None
    if ablation.rag_enabled:
        store = load_knowledge_base()
        enemy_classes = []
        for record in obs.units:
            if record.team != "P1" and record.type not in enemy_classes:
                enemy_classes.append(record.type)
        knowledge = build_knowledge_context(enemy_classes, store,
                                            config.max_context_chars)
    if ablation.role_enabled:
        bundles.append(build_role_bundle(obs, "P1", multimodal))
    bundles.append(build_act_bundle(obs, history, "P1", multimodal,
                                    plan=DEFAULT_PLAN,
                                    priorities=PriorityAssessment(),
                                    knowledge=knowledge, roles=None))
    return [(b.stage, b.text) for b in bundles]


def save_report(report, out_path: str | Path) -> tuple[Path, Path]:
    """Write <out>.json and <out>.txt; returns both paths."""
    out_path = Path(out_path)
    if out_path.suffix == ".json":
        out_path = out_path.with_suffix("")
    out_path.parent.mkdir(parents=True, exist_ok=True)
    json_path = out_path.with_suffix(".json")
    txt_path = out_path.with_suffix(".txt")
    json_path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    txt_path.write_text(report.text_table() + "\n")
    return json_path, txt_path
