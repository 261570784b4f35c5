"""Decision backends: who answers the stage prompts.

Three implementations of one contract (``query(PromptBundle) -> str``):

* ScriptedBackend - deterministic heuristics that read the battlefield
  straight out of the prompt text, so the whole prompt/parse path is
  exercised with zero model or network dependence.
* RecordedBackend - replays a stored transcript; raises on exhaustion.
* RemoteChatBackend - generic chat-completion HTTP client (vision-capable),
  configured via AVA_API_URL / AVA_API_KEY.

Scripted and Recorded are deterministic and safe for concurrent use across
episodes; RemoteChat is safe too (stateless requests), subject to server
rate limits.
"""

from __future__ import annotations

import base64
import json
import os
import re
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import httpx

from .errors import BackendUnavailable, TranscriptExhausted
from .parsing import DEFAULT_PLAN
from .prompts import (PromptBundle, STAGE_ACT, STAGE_ANALYZE, STAGE_PLAN,
                      STAGE_ROLE, STAGE_SYNTHESIZE, plan_to_json)
from .rng import SplitMix64
from .units import UnitCatalog, default_catalog


class DecisionBackend(Protocol):
    multimodal: bool
    deterministic: bool

    def query(self, bundle: PromptBundle) -> str: ...


# ---------------------------------------------------------------------------
# Scripted


_UNIT_LINE_RE = re.compile(
    r"(?P<label>(?P<cls>[A-Za-z]+)_\d+) \(Tag: (?P<uid>\d+)\) at grid "
    r"\((?P<gx>\d+),(?P<gy>\d+)\), HP (?P<hp>[\d.]+)/(?P<maxhp>[\d.]+)"
    r"(?:, shields (?P<sh>[\d.]+)/(?P<maxsh>[\d.]+))?"
    r"(?:, energy [\d.]+/[\d.]+)?"
    r", weapon (?P<weapon>ready|cooling)")
_TEAM_RE = re.compile(r"You are (P[12])\b")

# Class-default role table used by the scripted Role stage.
CLASS_ROLES = {
    "Medivac": "Support", "WarpPrism": "Support", "Sentry": "Support",
    "Reaper": "Skirmisher", "Phoenix": "Skirmisher", "Banshee": "Skirmisher",
    "Viking": "Skirmisher", "Zergling": "Skirmisher",
    "Zealot": "Protector", "Immortal": "Protector", "Archon": "Protector",
    "Hellbat": "Protector", "SpineCrawler": "Protector", "PhotonCannon": "Protector",
}
DEFAULT_CLASS_ROLE = "Assault"

_KITE_RANGE_CELLS = 2  # Chebyshev distance considered "threatened"


@dataclass
class _PromptUnit:
    label: str
    cls: str
    uid: int
    gx: int
    gy: int
    hp: float
    max_hp: float
    shields: float
    weapon_ready: bool
    team: str

    @property
    def effective_hp(self) -> float:
        return self.hp + self.shields


def _parse_prompt_battlefield(text: str) -> tuple[str, list[_PromptUnit], list[_PromptUnit]]:
    """Recover (my team, friendlies, enemies) from a stage prompt."""
    m = _TEAM_RE.search(text)
    team = m.group(1) if m else "P1"
    units: dict[str, list[_PromptUnit]] = {"P1": [], "P2": []}
    section = None
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("[P1 units]"):
            section = "P1"
            continue
        if stripped.startswith("[P2 units]"):
            section = "P2"
            continue
        if stripped.startswith("## "):
            section = None  # left the battlefield block
            continue
        if section is None:
            continue
        m = _UNIT_LINE_RE.search(stripped)
        if m:
            units[section].append(_PromptUnit(
                label=m.group("label"), cls=m.group("cls"),
                uid=int(m.group("uid")),
                gx=int(m.group("gx")), gy=int(m.group("gy")),
                hp=float(m.group("hp")), max_hp=float(m.group("maxhp")),
                shields=float(m.group("sh") or 0.0),
                weapon_ready=m.group("weapon") == "ready",
                team=section))
    enemy_team = "P2" if team == "P1" else "P1"
    return team, units[team], units[enemy_team]


def _cheb(a: _PromptUnit, b: _PromptUnit) -> int:
    return max(abs(a.gx - b.gx), abs(a.gy - b.gy))


class ScriptedBackend:
    """Deterministic heuristic player.

    Policies:
      focus_fire - every armed unit attacks the lowest-effective-health
                   enemy it can hit; a unit kites one cell away while its
                   weapon is cooling and an enemy is within 2 grid cells.
      random     - seeded coin flip per unit between a random attack and a
                   random grid move.
      idle       - issues nothing.
    """

    multimodal = False
    deterministic = True

    POLICIES = ("focus_fire", "random", "idle")

    def __init__(self, policy: str = "focus_fire", seed: int = 0,
                 catalog: UnitCatalog | None = None):
        policy = policy.replace("-", "_")
        if policy in ("random_target",):
            policy = "random"
        if policy in ("focus", "focusfire"):
            policy = "focus_fire"
        if policy not in self.POLICIES:
            raise ValueError(f"unknown scripted policy {policy!r}")
        self.policy = policy
        self.catalog = catalog or default_catalog()
        self._rng = SplitMix64(seed)

    def query(self, bundle: PromptBundle) -> str:
        if bundle.stage == STAGE_PLAN:
            return plan_to_json(DEFAULT_PLAN)
        if bundle.stage == STAGE_ANALYZE:
            return self._analyze(bundle.text)
        if bundle.stage == STAGE_ROLE:
            return self._roles(bundle.text)
        if bundle.stage == STAGE_ACT:
            return self._act(bundle.text)
        if bundle.stage == STAGE_SYNTHESIZE:
            return ("Engage the ranked targets in order; pull wounded units "
                    "back while their weapons cycle and keep splash sources "
                    "at the edge of the fight.")
        return ""

    # -- stages ---------------------------------------------------------------

    def _analyze(self, text: str) -> str:
        _, _, enemies = _parse_prompt_battlefield(text)
        if self.policy == "idle":
            return ""
        ranked = sorted(enemies, key=lambda e: (e.effective_hp, e.uid))
        blocks = []
        for e in ranked:
            blocks.append(f"Unit: {e.label} (Tag: {e.uid})\n"
                          f"Reason: At {e.hp:g}/{e.max_hp:g} HP it is the "
                          f"cheapest kill on the field right now.")
        return "\n\n".join(blocks)

    def _roles(self, text: str) -> str:
        if self.policy != "focus_fire":
            return ""
        _, friendlies, _ = _parse_prompt_battlefield(text)
        lines = [f"Role: {u.uid} -> {CLASS_ROLES.get(u.cls, DEFAULT_CLASS_ROLE)}"
                 for u in friendlies]
        return "\n".join(lines)

    def _can_hit(self, actor: _PromptUnit, enemy: _PromptUnit) -> bool:
        spec = self.catalog.specs.get(actor.cls)
        target_spec = self.catalog.specs.get(enemy.cls)
        if spec is None or target_spec is None or spec.attack_damage <= 0:
            return False
        return spec.can_target_layer(target_spec.layer)

    def _act(self, text: str) -> str:
        if self.policy == "idle":
            return ""
        _, friendlies, enemies = _parse_prompt_battlefield(text)
        if not enemies:
            return ""
        if self.policy == "random":
            return self._act_random(friendlies, enemies)
        return self._act_focus(friendlies, enemies)

    def _act_focus(self, friendlies, enemies) -> str:
        lines = []
        for u in friendlies:
            targets = [e for e in enemies if self._can_hit(u, e)]
            if not targets:
                continue
            focus = min(targets, key=lambda e: (e.effective_hp, e.uid))
            nearest = min(enemies, key=lambda e: (_cheb(u, e), e.uid))
            if (not u.weapon_ready and _cheb(u, nearest) <= _KITE_RANGE_CELLS
                    and self._outranges(u, nearest)):
                lines.append(f"Move {u.uid} {self._away_from(u, nearest)}")
            else:
                lines.append(f"Attack {u.uid} {focus.uid}")
        return "\n".join(lines)

    def _outranges(self, actor: _PromptUnit, threat: _PromptUnit) -> bool:
        """Kiting only pays when the kiter's weapon reaches farther."""
        mine = self.catalog.specs.get(actor.cls)
        theirs = self.catalog.specs.get(threat.cls)
        if mine is None or theirs is None:
            return False
        return mine.attack_range > theirs.attack_range

    def _act_random(self, friendlies, enemies) -> str:
        lines = []
        for u in friendlies:
            targets = [e for e in enemies if self._can_hit(u, e)]
            if targets and self._rng.next_below(2) == 0:
                pick = targets[self._rng.next_below(len(targets))]
                lines.append(f"Attack {u.uid} {pick.uid}")
            else:
                gx = self._rng.next_range(1, 10)
                gy = self._rng.next_range(1, 10)
                lines.append(f"Move {u.uid} {gx} {gy}")
        return "\n".join(lines)

    @staticmethod
    def _away_from(u: _PromptUnit, threat: _PromptUnit) -> str:
        dx = u.gx - threat.gx
        dy = u.gy - threat.gy
        if abs(dx) >= abs(dy):
            if dx != 0:
                return "RIGHT" if dx > 0 else "LEFT"
            return "LEFT" if u.gx > 5 else "RIGHT"
        return "UP" if dy > 0 else "DOWN"


# ---------------------------------------------------------------------------
# Recorded


class RecordedBackend:
    """Replays a stored transcript of responses, in order.

    Accepts a JSONL path or an in-memory list of records shaped
    ``{"stage": ..., "response": ...}``; the stage field, when present,
    must match the queried stage.  Exhaustion raises TranscriptExhausted.
    """

    multimodal = False
    deterministic = True

    def __init__(self, source: str | Path | list[dict]):
        if isinstance(source, (str, Path)):
            records = []
            for line in Path(source).read_text().splitlines():
                line = line.strip()
                if line:
                    records.append(json.loads(line))
            self.records = records
        else:
            self.records = list(source)
        self._cursor = 0

    def query(self, bundle: PromptBundle) -> str:
        if self._cursor >= len(self.records):
            raise TranscriptExhausted(
                f"transcript exhausted after {self._cursor} responses "
                f"(next stage requested: {bundle.stage})")
        record = self.records[self._cursor]
        self._cursor += 1
        expected = record.get("stage")
        if expected is not None and expected != bundle.stage:
            raise BackendUnavailable(
                f"transcript out of sync at record {self._cursor - 1}: "
                f"has {expected!r}, pipeline asked for {bundle.stage!r}")
        return str(record.get("response", ""))

    def remaining(self) -> int:
        return len(self.records) - self._cursor


# ---------------------------------------------------------------------------
# Remote chat


ENV_API_URL = "AVA_API_URL"
ENV_API_KEY = "AVA_API_KEY"


@dataclass
class RemoteChatConfig:
    url: str = ""
    api_key: str = ""
    model: str = "gpt-4o"
    timeout_s: float = 60.0
    max_retries: int = 2
    retry_backoff_s: float = 1.0

    @classmethod
    def from_env(cls, **overrides) -> "RemoteChatConfig":
        cfg = cls(url=os.environ.get(ENV_API_URL, ""),
                  api_key=os.environ.get(ENV_API_KEY, ""))
        for key, value in overrides.items():
            setattr(cfg, key, value)
        return cfg


class RemoteChatBackend:
    """Generic chat-completion wire client (OpenAI-style message schema).

    One user message per query: a text part plus, when the bundle carries a
    frame, a base64 PNG image part.  Never used in CI; tests exercise the
    wire format through an injected mock transport.
    """

    multimodal = True
    deterministic = False

    def __init__(self, config: RemoteChatConfig | None = None,
                 client: httpx.Client | None = None):
        self.config = config or RemoteChatConfig.from_env()
        if not self.config.url:
            raise BackendUnavailable(
                f"no endpoint configured (set {ENV_API_URL})")
        self._client = client or httpx.Client(timeout=self.config.timeout_s)

    def build_payload(self, bundle: PromptBundle) -> dict:
        content: list[dict] = [{"type": "text", "text": bundle.text}]
        if bundle.image is not None:
            b64 = base64.b64encode(bundle.image).decode("ascii")
            content.append({
                "type": "image_url",
                "image_url": {"url": f"data:image/png;base64,{b64}"},
            })
        return {
            "model": self.config.model,
            "messages": [{"role": "user", "content": content}],
        }

    def query(self, bundle: PromptBundle) -> str:
        headers = {}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        payload = self.build_payload(bundle)
        last_error: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            try:
                resp = self._client.post(self.config.url, json=payload,
                                         headers=headers)
                resp.raise_for_status()
                data = resp.json()
                return data["choices"][0]["message"]["content"]
            except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
                last_error = exc
                if attempt < self.config.max_retries:
                    time.sleep(self.config.retry_backoff_s * (attempt + 1))
        raise BackendUnavailable(f"remote backend failed: {last_error}")

    def close(self) -> None:
        self._client.close()


# ---------------------------------------------------------------------------
# Backend spec strings:  scripted:<policy> | recorded:<path> | remote:<model>


def make_backend(spec: str, seed: int = 0,
                 catalog: UnitCatalog | None = None) -> DecisionBackend:
    """Resolve a backend spec string as used by the CLI and harness."""
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "scripted":
        return ScriptedBackend(arg or "focus_fire", seed=seed, catalog=catalog)
    if kind == "recorded":
        if not arg:
            raise ValueError("recorded backend needs a path: recorded:<path>")
        return RecordedBackend(arg)
    if kind == "remote":
        cfg = RemoteChatConfig.from_env()
        if arg:
            cfg.model = arg
        return RemoteChatBackend(cfg)
    raise ValueError(f"unknown backend spec {spec!r}")
