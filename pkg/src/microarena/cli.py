"""Command-line harness: evaluation runs, ablations, head-to-head matches,
replay export, and the battle server.

Backend specs: ``scripted:<focus_fire|random|idle>``, ``recorded:<path>``,
``remote:<model>`` (endpoint/credentials via AVA_API_URL / AVA_API_KEY).
A JSON config file may set defaults; command-line flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness import BUILTIN, cmd_ablate, cmd_pvp, cmd_run, save_report
from .pipeline import ABLATION_GRID, AblationConfig, PipelineConfig
from .render import RenderConfig
from .replay import export_frames
from .server import ServerConfig, ArenaServer


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    return json.loads(Path(path).read_text())


def _pipeline_config(cfg: dict, ablation: AblationConfig) -> PipelineConfig:
    render_cfg = cfg.get("render", {})
    return PipelineConfig(
        ablation=ablation,
        history_capacity=int(cfg.get("history_capacity", 5)),
        separate_synthesize_stage=bool(cfg.get("separate_synthesize_stage", False)),
        max_context_chars=int(cfg.get("max_context_chars", 4000)),
        render=RenderConfig(
            height=int(render_cfg.get("height", 512)),
            width=int(render_cfg.get("width", 512)),
            show_grid=bool(render_cfg.get("show_grid", True)),
            show_tags=bool(render_cfg.get("show_tags", True)),
        ),
    )


def _ablation_from_flags(args) -> AblationConfig:
    return AblationConfig(
        role_enabled=not args.no_role,
        mpi_enabled=not args.no_mpi,
        rag_enabled=not args.no_rag,
    )


def _add_ablation_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--no-role", action="store_true",
                        help="disable the role-assignment stage")
    parser.add_argument("--no-mpi", action="store_true",
                        help="disable the priority-analysis stage")
    parser.add_argument("--no-rag", action="store_true",
                        help="disable knowledge retrieval")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="microarena",
        description="Micromanagement battle simulator: evaluation harness and server")
    parser.add_argument("--config", help="JSON config file (flags win)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="win-rate evaluation against an opponent")
    run.add_argument("--scenario", required=True,
                     help="scenario id, or 'all' for the whole catalog")
    run.add_argument("--backend", required=True, help="P1 backend spec")
    run.add_argument("--opponent", default=BUILTIN,
                     help="P2 backend spec or 'builtin' (default)")
    run.add_argument("--episodes", type=int, default=20)
    run.add_argument("--seed", type=int, default=0, help="seed base")
    run.add_argument("--out", help="report path stem (.json/.txt)")
    run.add_argument("--replays", help="directory for per-episode replays")
    run.add_argument("--workers", type=int, default=4)
    run.add_argument("--dry-run", action="store_true",
                     help="print the first step's assembled prompts and exit "
                          "(no backend, no network)")
    _add_ablation_flags(run)

    ablate = sub.add_parser("ablate", help="stage-toggle sweep on one scenario")
    ablate.add_argument("--scenario", required=True)
    ablate.add_argument("--backend", required=True)
    ablate.add_argument("--opponent", default=BUILTIN)
    ablate.add_argument("--episodes", type=int, default=5)
    ablate.add_argument("--seed", type=int, default=0)
    ablate.add_argument("--out", help="report path stem")
    ablate.add_argument("--grid", action="store_true",
                        help="run all 8 toggle combinations (default when no "
                             "--no-* flag is given)")
    ablate.add_argument("--workers", type=int, default=4)
    _add_ablation_flags(ablate)

    pvp = sub.add_parser("pvp", help="head-to-head between two backends")
    pvp.add_argument("--scenario", required=True)
    pvp.add_argument("--backend-a", required=True)
    pvp.add_argument("--backend-b", required=True)
    pvp.add_argument("--matches", type=int, default=20)
    pvp.add_argument("--seed", type=int, default=0)
    pvp.add_argument("--out", help="report path stem")
    pvp.add_argument("--workers", type=int, default=4)
    _add_ablation_flags(pvp)

    replay = sub.add_parser("replay", help="re-render a replay to PNG frames")
    replay.add_argument("--in", dest="replay_in", required=True)
    replay.add_argument("--frames", required=True, help="output directory")

    serve_p = sub.add_parser("serve", help="run the battle server")
    serve_p.add_argument("--port", type=int, default=7464)
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--step-deadline", type=float, default=2.0,
                         help="PvP barrier deadline in seconds")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "run":
            ablation = _ablation_from_flags(args)
            if args.dry_run:
                from .harness import dry_run_prompts
                scenario = args.scenario if args.scenario != "all" else "3m"
                multimodal = args.backend.startswith("remote")
                for stage, text in dry_run_prompts(
                        scenario, args.seed, ablation,
                        _pipeline_config(cfg, ablation), multimodal):
                    print(f"{'=' * 24} {stage} prompt {'=' * 24}")
                    print(text)
                return 0
            report = cmd_run(args.scenario, args.backend,
                             episodes=args.episodes, seed_base=args.seed,
                             opponent_spec=args.opponent, ablation=ablation,
                             config=_pipeline_config(cfg, ablation),
                             replay_dir=args.replays, workers=args.workers)
            print(report.text_table())
            if args.out:
                paths = save_report(report, args.out)
                print(f"report written: {paths[0]}, {paths[1]}")
            errors = sum(r.errors for r in report.rows)
            return 0 if errors == 0 else 1

        if args.command == "ablate":
            ablation = _ablation_from_flags(args)
            use_grid = args.grid or not (args.no_role or args.no_mpi or args.no_rag)
            grid = ABLATION_GRID if use_grid else (ablation,)
            report = cmd_ablate(args.scenario, args.backend,
                                episodes=args.episodes, seed_base=args.seed,
                                opponent_spec=args.opponent,
                                config=_pipeline_config(cfg, ablation),
                                grid=grid, workers=args.workers)
            print(report.text_table())
            if args.out:
                paths = save_report(report, args.out)
                print(f"report written: {paths[0]}, {paths[1]}")
            return 0

        if args.command == "pvp":
            ablation = _ablation_from_flags(args)
            report = cmd_pvp(args.scenario, args.backend_a, args.backend_b,
                             matches=args.matches, seed_base=args.seed,
                             ablation=ablation,
                             config=_pipeline_config(cfg, ablation),
                             workers=args.workers)
            print(report.text_table())
            if args.out:
                paths = save_report(report, args.out)
                print(f"report written: {paths[0]}, {paths[1]}")
            return 0 if report.errors == 0 else 1

        if args.command == "replay":
            frames = export_frames(args.replay_in, args.frames)
            print(f"{len(frames)} frames written to {args.frames}")
            return 0

        if args.command == "serve":
            render_cfg = cfg.get("render", {})
            config = ServerConfig(
                host=args.host, port=args.port,
                step_deadline_s=args.step_deadline,
                render=RenderConfig(
                    height=int(render_cfg.get("height", 512)),
                    width=int(render_cfg.get("width", 512))))
            server = ArenaServer(config)
            print(f"serving on {args.host}:{server.port} (Ctrl-C to stop)")
            try:
                server.serve_forever()
            except KeyboardInterrupt:
                server.stop()
            return 0
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
