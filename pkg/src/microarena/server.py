"""Newline-delimited JSON battle server over TCP.

One JSON object per line in each direction.  Operations: create, reset,
observe, step, close.  Responses carry ``{"ok": true, ...}`` or
``{"ok": false, "code", "message"}``; a malformed line answers BAD_REQUEST
and the connection stays open.

PvE sessions apply a step immediately, with the builtin opponent driving
the other side.  PvP sessions hold the first team's submission at a
barrier until the second team submits or ``step_deadline_s`` lapses; a
silent side contributes the empty action set.  Rewards in step responses
are from the requesting team's perspective.

Sessions are isolated: every touch of a session's engine state happens
under that session's lock, and distinct sessions share nothing mutable.
"""

from __future__ import annotations

import base64
import json
import socketserver
import threading
import uuid
from dataclasses import dataclass, field

from .engine import apply_step, builtin_opponent, other_team
from .errors import MicroArenaError, UnknownScenario
from .observe import Observation, observe
from .parsing import parse_action_lines
from .render import RenderConfig, encode_png
from .scenarios import instantiate, load_scenario
from .units import default_catalog

DEFAULT_STEP_DEADLINE_S = 2.0

# Error codes on the wire.
BAD_REQUEST = "BAD_REQUEST"
UNKNOWN_SESSION = "UNKNOWN_SESSION"
SESSION_DONE = "SESSION_DONE"
DUPLICATE_SUBMIT = "DUPLICATE_SUBMIT"
UNKNOWN_SCENARIO = "UNKNOWN_SCENARIO"
INTERNAL = "INTERNAL"


@dataclass
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 7464
    step_deadline_s: float = DEFAULT_STEP_DEADLINE_S
    render: RenderConfig = field(default_factory=RenderConfig)
    include_image: bool = True


class _Session:
    def __init__(self, session_id: str, scenario_id: str, seed: int, mode: str,
                 team: str, render: RenderConfig, include_image: bool,
                 step_deadline_s: float, catalog):
        self.session_id = session_id
        self.scenario_id = scenario_id
        self.seed = seed
        self.mode = mode
        self.team = team                      # creator's team (PvE side)
        self.render = render
        self.include_image = include_image
        self.step_deadline_s = step_deadline_s
        self.catalog = catalog
        self.cond = threading.Condition()
        self.spec = load_scenario(scenario_id, catalog)
        self.state = instantiate(self.spec, seed, catalog)
        self.done = False
        self.epoch = 0                        # bumps after every applied step
        self.pending: dict[str, list] = {}    # team -> parsed actions
        self.last_result = None               # engine StepResult of last apply

    def reset(self) -> None:
        self.state = instantiate(self.spec, self.seed, self.catalog)
        self.done = False
        self.pending.clear()
        self.last_result = None

    def apply_pending(self) -> None:
        """Apply one step with whatever is buffered (missing side empty)."""
        p1 = self.pending.get("P1", [])
        p2 = self.pending.get("P2", [])
        if self.mode == "PvE":
            opponent = other_team(self.team)
            filled = list(builtin_opponent(self.state, opponent))
            if opponent == "P1":
                p1 = filled
            else:
                p2 = filled
        result = apply_step(self.state, p1, p2)
        self.last_result = result
        self.done = result.done
        self.pending.clear()
        self.epoch += 1


def observation_to_json(obs: Observation, include_image: bool) -> dict:
    payload = {
        "decision_step": obs.decision_step,
        "text": obs.text,
        "height": obs.height,
        "width": obs.width,
        "units": [{
            "id": r.id, "type": r.type, "team": r.team, "label": r.label,
            "pos": [r.pos[0], r.pos[1]], "grid": [r.grid[0], r.grid[1]],
            "attr": r.attr, "status": r.status,
        } for r in obs.units],
        "annotations": [{
            "p": [a.p[0], a.p[1]], "c": a.c,
            "b": [a.b[0], a.b[1], a.b[2], a.b[3]], "tag": a.tag,
        } for a in obs.annotations],
    }
    if include_image and obs.image is not None:
        payload["image"] = base64.b64encode(encode_png(obs.image)).decode("ascii")
        payload["image_format"] = "png"
    return payload


class _Handler(socketserver.StreamRequestHandler):
    server: "ArenaServer"

    def handle(self) -> None:
        while True:
            try:
                raw = self.rfile.readline()
            except (ConnectionError, OSError):
                return
            if not raw:
                return
            line = raw.decode("utf-8", errors="replace").strip()
            if not line:
                continue
            try:
                message = json.loads(line)
                if not isinstance(message, dict):
                    raise ValueError("message must be a JSON object")
            except (json.JSONDecodeError, ValueError) as exc:
                self._send({"ok": False, "code": BAD_REQUEST,
                            "message": f"bad message: {exc}"})
                continue
            try:
                response = self.server.dispatch(message)
            except MicroArenaError as exc:
                response = {"ok": False, "code": INTERNAL, "message": str(exc)}
            except Exception as exc:  # never kill the connection
                response = {"ok": False, "code": INTERNAL, "message": repr(exc)}
            if "req_id" in message:
                response["req_id"] = message["req_id"]
            try:
                self._send(response)
            except (ConnectionError, OSError):
                return

    def _send(self, payload: dict) -> None:
        self.wfile.write(json.dumps(payload, separators=(",", ":")).encode() + b"\n")
        self.wfile.flush()


class ArenaServer(socketserver.ThreadingTCPServer):
    """Threaded NDJSON battle server; one handler thread per connection."""

    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, config: ServerConfig | None = None):
        self.config = config or ServerConfig()
        self.catalog = default_catalog()
        self.sessions: dict[str, _Session] = {}
        self.sessions_lock = threading.Lock()
        super().__init__((self.config.host, self.config.port), _Handler)
        self.port = self.server_address[1]

    # -- dispatch -------------------------------------------------------------

    def dispatch(self, message: dict) -> dict:
        op = message.get("op")
        handler = {
            "create": self.op_create, "reset": self.op_reset,
            "observe": self.op_observe, "step": self.op_step,
            "close": self.op_close, "list_scenarios": self.op_list,
        }.get(op)
        if handler is None:
            return {"ok": False, "code": BAD_REQUEST,
                    "message": f"unknown op {op!r}"}
        return handler(message)

    def _session(self, message: dict) -> _Session | dict:
        sid = message.get("session_id")
        with self.sessions_lock:
            session = self.sessions.get(sid)
        if session is None:
            return {"ok": False, "code": UNKNOWN_SESSION,
                    "message": f"no session {sid!r}"}
        return session

    @staticmethod
    def _team(message: dict, session: _Session) -> str | dict:
        team = message.get("team", session.team)
        if team not in ("P1", "P2"):
            return {"ok": False, "code": BAD_REQUEST,
                    "message": f"bad team {team!r}"}
        return team

    def op_list(self, message: dict) -> dict:
        from .scenarios import list_scenarios
        return {"ok": True, "scenarios": [
            {"id": sid, "mode": mode, "description": desc}
            for sid, mode, desc in list_scenarios(self.catalog)]}

    def op_create(self, message: dict) -> dict:
        scenario_id = message.get("scenario")
        mode = message.get("mode", "PvE")
        if mode not in ("PvE", "PvP"):
            return {"ok": False, "code": BAD_REQUEST,
                    "message": f"bad mode {mode!r}"}
        team = message.get("team", "P1")
        if team not in ("P1", "P2"):
            return {"ok": False, "code": BAD_REQUEST,
                    "message": f"bad team {team!r}"}
        try:
            seed = int(message.get("seed", 0))
        except (TypeError, ValueError):
            return {"ok": False, "code": BAD_REQUEST, "message": "bad seed"}
        render = self.config.render
        if "render" in message:
            r = message["render"]
            try:
                render = RenderConfig(
                    height=int(r.get("height", render.height)),
                    width=int(r.get("width", render.width)),
                    show_grid=bool(r.get("show_grid", render.show_grid)),
                    show_tags=bool(r.get("show_tags", render.show_tags)),
                ).validate()
            except (MicroArenaError, TypeError, ValueError) as exc:
                return {"ok": False, "code": BAD_REQUEST,
                        "message": f"bad render config: {exc}"}
        include_image = bool(message.get("include_image", self.config.include_image))
        deadline = float(message.get("step_deadline_s", self.config.step_deadline_s))
        session_id = uuid.uuid4().hex[:12]
        try:
            session = _Session(session_id, scenario_id, seed, mode, team,
                               render, include_image, deadline, self.catalog)
        except UnknownScenario as exc:
            return {"ok": False, "code": UNKNOWN_SCENARIO, "message": str(exc)}
        except MicroArenaError as exc:
            return {"ok": False, "code": BAD_REQUEST, "message": str(exc)}
        with self.sessions_lock:
            self.sessions[session_id] = session
        return {"ok": True, "session_id": session_id, "scenario": scenario_id,
                "seed": seed, "mode": mode, "team": team}

    def _observe_payload(self, session: _Session, team: str,
                         include_image: bool) -> dict:
        obs = observe(session.state, team, session.render,
                      include_image=include_image)
        return observation_to_json(obs, include_image)

    def op_reset(self, message: dict) -> dict:
        session = self._session(message)
        if isinstance(session, dict):
            return session
        team = self._team(message, session)
        if isinstance(team, dict):
            return team
        include_image = bool(message.get("include_image", session.include_image))
        with session.cond:
            session.reset()
            payload = self._observe_payload(session, team, include_image)
            session.cond.notify_all()
        return {"ok": True, "observation": payload}

    def op_observe(self, message: dict) -> dict:
        session = self._session(message)
        if isinstance(session, dict):
            return session
        team = self._team(message, session)
        if isinstance(team, dict):
            return team
        include_image = bool(message.get("include_image", session.include_image))
        with session.cond:
            payload = self._observe_payload(session, team, include_image)
        return {"ok": True, "observation": payload}

    def op_step(self, message: dict) -> dict:
        session = self._session(message)
        if isinstance(session, dict):
            return session
        team = self._team(message, session)
        if isinstance(team, dict):
            return team
        lines = message.get("actions", [])
        if not isinstance(lines, list):
            return {"ok": False, "code": BAD_REQUEST,
                    "message": "actions must be a list of strings"}
        include_image = bool(message.get("include_image", session.include_image))
        actions, parse_rejections = parse_action_lines(
            "\n".join(str(line) for line in lines))

        with session.cond:
            if session.done:
                return {"ok": False, "code": SESSION_DONE,
                        "message": "episode finished; reset to continue"}
            if team in session.pending:
                return {"ok": False, "code": DUPLICATE_SUBMIT,
                        "message": f"{team} already submitted this step"}
            session.pending[team] = actions
            my_epoch = session.epoch

            if session.mode == "PvE" or len(session.pending) == 2:
                session.apply_pending()
                session.cond.notify_all()
            else:
                deadline = session.step_deadline_s
                while session.epoch == my_epoch:
                    if not session.cond.wait(timeout=deadline):
                        if session.epoch == my_epoch:
                            session.apply_pending()   # silent side = empty set
                            session.cond.notify_all()
                        break

            result = session.last_result
            engine_rejections = [
                {"team": r.team, "line": _format_rejected(r), "reason": r.reason,
                 "detail": r.detail}
                for r in (result.rejections if result else ())
            ]
            payload = self._observe_payload(session, team, include_image)
            reward = result.reward if team == "P1" else -result.reward
            return {
                "ok": True,
                "observation": payload,
                "reward": reward,
                "done": result.done,
                "outcome": result.outcome.result,
                "rejections": [
                    {"team": team, "line": r.line, "reason": r.reason,
                     "detail": r.detail} for r in parse_rejections
                ] + engine_rejections,
                "applied": [ _format_applied(a) for a in actions ],
            }

    def op_close(self, message: dict) -> dict:
        sid = message.get("session_id")
        with self.sessions_lock:
            session = self.sessions.pop(sid, None)
        if session is None:
            return {"ok": False, "code": UNKNOWN_SESSION,
                    "message": f"no session {sid!r}"}
        with session.cond:
            session.done = True
            session.cond.notify_all()
        return {"ok": True}

    # -- lifecycle --------------------------------------------------------------

    def start_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread

    def stop(self) -> None:
        self.shutdown()
        self.server_close()


def _format_applied(action) -> str:
    from .actions import format_action
    return format_action(action)


def _format_rejected(rejection) -> str:
    from .actions import format_action
    try:
        return format_action(rejection.action)
    except TypeError:
        return repr(rejection.action)


def serve(port: int, config: ServerConfig | None = None) -> ArenaServer:
    """Bind and return a running server (background thread); caller stops it."""
    config = config or ServerConfig()
    config.port = port
    server = ArenaServer(config)
    server.start_background()
    return server
