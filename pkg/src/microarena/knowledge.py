"""Keyed domain-knowledge store and decision-prompt context synthesis.

Retrieval is an exact lookup by unit class: per class the store holds a
specification block (stat summary plus numeric dps/range/speed/health),
matchup lists, and free-text tactical insights.  Context assembly
concatenates blocks in priority-rank order under a character budget.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import DanglingClass, SchemaError, UnknownClass
from .units import UnitCatalog, default_catalog

DEFAULT_MAX_CONTEXT_CHARS = 4000


@dataclass(frozen=True)
class KnowledgeEntry:
    class_key: str
    summary: str
    dps: float
    range: float
    speed: float
    health: float
    strong_against: tuple[str, ...]
    weak_against: tuple[str, ...]
    insights: tuple[str, ...]

    def block(self) -> str:
        lines = [
            f"### {self.class_key}",
            f"Specs: {self.summary}",
            f"Numbers: DPS {self.dps}, range {self.range}, speed {self.speed}, health {self.health}.",
            f"Strong against: {', '.join(self.strong_against) or 'none'}.",
            f"Weak against: {', '.join(self.weak_against) or 'none'}.",
        ]
        for tip in self.insights:
            lines.append(f"- {tip}")
        return "\n".join(lines)


@dataclass(frozen=True)
class KnowledgeStore:
    version: int
    entries: dict[str, KnowledgeEntry]

    def retrieve(self, class_key: str) -> KnowledgeEntry:
        try:
            return self.entries[class_key]
        except KeyError:
            raise UnknownClass(class_key) from None

    def __contains__(self, class_key: str) -> bool:
        return class_key in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def _read_raw_entries(path: str | Path | None) -> tuple[int, dict[str, dict]]:
    """The bundled base is one JSON file per class plus an index; a single
    all-in-one JSON file (``{"entries": {...}}``) is accepted too."""
    if path is None:
        base = resources.files("microarena.data").joinpath("knowledge")
        index = json.loads(base.joinpath("index.json").read_text())
        raw_entries = {}
        for key, fname in index.get("entries", {}).items():
            entry = json.loads(base.joinpath(fname).read_text())
            if entry.get("class", key) != key:
                raise SchemaError(f"knowledge/{fname}", "class field mismatch")
            raw_entries[key] = entry
        return int(index.get("version", 1)), raw_entries
    path = Path(path)
    if path.is_dir():
        index = json.loads((path / "index.json").read_text())
        raw_entries = {}
        for key, fname in index.get("entries", {}).items():
            entry = json.loads((path / fname).read_text())
            if entry.get("class", key) != key:
                raise SchemaError(f"{fname}", "class field mismatch")
            raw_entries[key] = entry
        return int(index.get("version", 1)), raw_entries
    raw = json.loads(path.read_text())
    return int(raw.get("version", 1)), dict(raw.get("entries", {}))


def load_knowledge_base(path: str | Path | None = None,
                        catalog: UnitCatalog | None = None) -> KnowledgeStore:
    """Load and validate the store; every catalog class must have an entry
    and every matchup reference must resolve to a catalog class."""
    catalog = catalog or default_catalog()
    version, raw_entries = _read_raw_entries(path)
    entries: dict[str, KnowledgeEntry] = {}
    for key, e in raw_entries.items():
        try:
            entry = KnowledgeEntry(
                class_key=key,
                summary=str(e["summary"]),
                dps=float(e["dps"]),
                range=float(e["range"]),
                speed=float(e["speed"]),
                health=float(e["health"]),
                strong_against=tuple(e.get("strong_against", ())),
                weak_against=tuple(e.get("weak_against", ())),
                insights=tuple(e.get("insights", ())),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"knowledge.{key}", str(exc)) from None
        for ref in entry.strong_against + entry.weak_against:
            if ref not in catalog:
                raise DanglingClass(ref)
        entries[key] = entry
    for cls in catalog:
        if cls not in entries:
            raise SchemaError(f"knowledge.{cls}", "catalog class has no knowledge entry")
    for key in entries:
        if key not in catalog:
            raise DanglingClass(key)
    return KnowledgeStore(version=version, entries=entries)


def build_knowledge_context(priorities, store: KnowledgeStore,
                            max_context_chars: int = DEFAULT_MAX_CONTEXT_CHARS) -> str:
    """Concatenate knowledge blocks in priority-rank order.

    ``priorities`` is an ordered iterable exposing ``class_label`` unit
    class names (PriorityAssessment entries or plain class-name strings).
    Blocks past the character budget are dropped whole from the tail; a
    class appearing twice contributes one block at its best rank.
    """
    blocks: list[str] = []
    seen: set[str] = set()
    total = 0
    for item in priorities:
        class_key = item if isinstance(item, str) else item.class_name
        if class_key in seen:
            continue
        seen.add(class_key)
        block = store.retrieve(class_key).block()
        cost = len(block) + (2 if blocks else 0)
        if total + cost > max_context_chars:
            break
        blocks.append(block)
        total += cost
    return "\n\n".join(blocks)
