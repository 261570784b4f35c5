"""Scenario catalog: declarative battle compositions and spawning.

Each scenario is one JSON file under ``data/scenarios/`` listed in
``index.json``.  Instantiation is a pure function of (spec, seed): units are
placed on a jittered lattice (2.0-unit pitch, +/-0.5 jitter, so units are
never closer than 1.0) inside their spawn region, uids assigned in spawn
order starting at 1, P1 groups first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal
from importlib import resources
from pathlib import Path

from .engine import BattleState, UnitState
from .errors import MissingClass, SchemaError, SpawnOverflow, UnknownScenario
from .fixedpoint import to_milli
from .rng import SplitMix64
from .units import UnitCatalog, default_catalog

_LATTICE_PITCH = 2000   # milli
_JITTER = 500           # milli, keeps >= 1.0 world-unit spacing


@dataclass(frozen=True)
class SpawnGroup:
    class_name: str
    count: int
    region: tuple[int, int, int, int]   # x0, y0, x1, y1 in milli


@dataclass(frozen=True)
class ScenarioSpec:
    id: str
    mode: str                           # PvE | PvP (intended mode; engine runs either)
    description: str
    arena_w: int                        # milli
    arena_h: int
    abilities_enabled: bool
    p1_units: tuple[SpawnGroup, ...]
    p2_units: tuple[SpawnGroup, ...]


def _scenario_dir():
    return resources.files("microarena.data").joinpath("scenarios")


def _load_index(base_dir: Path | None) -> dict[str, str]:
    if base_dir is not None:
        raw = json.loads((Path(base_dir) / "index.json").read_text())
    else:
        raw = json.loads(_scenario_dir().joinpath("index.json").read_text())
    return dict(raw["scenarios"])


def _parse_group(raw: dict, arena_w: int, arena_h: int,
                 catalog: UnitCatalog, where: str) -> SpawnGroup:
    cls = raw.get("class")
    if cls not in catalog:
        raise MissingClass(str(cls))
    count = int(raw.get("count", 0))
    if count < 1:
        raise SchemaError(f"{where}.count", "must be >= 1")
    try:
        x0, y0, x1, y1 = (to_milli(Decimal(v)) for v in raw["region"])
    except (KeyError, ValueError, TypeError) as exc:
        raise SchemaError(f"{where}.region", str(exc)) from None
    if not (0 <= x0 < x1 <= arena_w and 0 <= y0 < y1 <= arena_h):
        raise SchemaError(f"{where}.region", "region outside arena or degenerate")
    return SpawnGroup(cls, count, (x0, y0, x1, y1))


def parse_scenario(raw: dict, catalog: UnitCatalog) -> ScenarioSpec:
    sid = raw.get("id")
    if not sid:
        raise SchemaError("id", "missing")
    mode = raw.get("mode")
    if mode not in ("PvE", "PvP"):
        raise SchemaError(f"{sid}.mode", f"unknown mode {mode!r}")
    try:
        arena_w = to_milli(Decimal(raw["arena"][0]))
        arena_h = to_milli(Decimal(raw["arena"][1]))
    except (KeyError, IndexError, TypeError) as exc:
        raise SchemaError(f"{sid}.arena", str(exc)) from None
    p1 = tuple(_parse_group(g, arena_w, arena_h, catalog, f"{sid}.p1")
               for g in raw.get("p1", ()))
    p2 = tuple(_parse_group(g, arena_w, arena_h, catalog, f"{sid}.p2")
               for g in raw.get("p2", ()))
    if not p1 or not p2:
        raise SchemaError(f"{sid}", "both sides need at least one unit group")
    return ScenarioSpec(
        id=sid, mode=mode, description=raw.get("description", ""),
        arena_w=arena_w, arena_h=arena_h,
        abilities_enabled=bool(raw.get("abilities_enabled", False)),
        p1_units=p1, p2_units=p2)


def load_scenario(scenario_id: str, catalog: UnitCatalog | None = None,
                  base_dir: Path | None = None) -> ScenarioSpec:
    catalog = catalog or default_catalog()
    index = _load_index(base_dir)
    if scenario_id not in index:
        raise UnknownScenario(scenario_id)
    fname = index[scenario_id]
    if base_dir is not None:
        text = (Path(base_dir) / fname).read_text()
    else:
        text = _scenario_dir().joinpath(fname).read_text()
    spec = parse_scenario(json.loads(text), catalog)
    if spec.id != scenario_id:
        raise SchemaError(f"{fname}.id", f"file claims {spec.id!r}")
    return spec


def list_scenarios(catalog: UnitCatalog | None = None,
                   base_dir: Path | None = None) -> list[tuple[str, str, str]]:
    """(id, mode, description) for every bundled scenario, alphabetical."""
    catalog = catalog or default_catalog()
    out = []
    for sid in sorted(_load_index(base_dir)):
        spec = load_scenario(sid, catalog, base_dir)
        out.append((spec.id, spec.mode, spec.description))
    return out


def _lattice_capacity(region: tuple[int, int, int, int]) -> tuple[int, int]:
    x0, y0, x1, y1 = region
    w = x1 - x0
    h = y1 - y0
    cols = (w - _LATTICE_PITCH) // _LATTICE_PITCH + 1 if w >= _LATTICE_PITCH else 0
    rows = (h - _LATTICE_PITCH) // _LATTICE_PITCH + 1 if h >= _LATTICE_PITCH else 0
    return cols, rows


def instantiate(spec: ScenarioSpec, seed: int,
                catalog: UnitCatalog | None = None) -> BattleState:
    """Create the initial battle state for (spec, seed); deterministic."""
    catalog = catalog or default_catalog()
    rng = SplitMix64(seed)
    units: dict[int, UnitState] = {}
    uid = 1
    for team, groups in (("P1", spec.p1_units), ("P2", spec.p2_units)):
        # Groups sharing a region fill one lattice; track the next free slot.
        cursors: dict[tuple[int, int, int, int], int] = {}
        for group in groups:
            cols, rows = _lattice_capacity(group.region)
            start = cursors.get(group.region, 0)
            if cols * rows < start + group.count:
                raise SpawnOverflow(
                    f"{spec.id}: region {group.region} holds {cols * rows} units, "
                    f"needs {start + group.count}")
            x0, y0, _, _ = group.region
            unit_spec = catalog[group.class_name]
            for i in range(start, start + group.count):
                base_x = x0 + 1000 + (i % cols) * _LATTICE_PITCH
                base_y = y0 + 1000 + (i // cols) * _LATTICE_PITCH
                jx = rng.next_range(-_JITTER, _JITTER)
                jy = rng.next_range(-_JITTER, _JITTER)
                units[uid] = UnitState(
                    uid=uid, spec=unit_spec, team=team,
                    x=base_x + jx, y=base_y + jy,
                    health=unit_spec.max_health,
                    shields=unit_spec.max_shields,
                    energy=unit_spec.start_energy)
                uid += 1
            cursors[group.region] = start + group.count
    return BattleState(
        scenario_id=spec.id, arena_w=spec.arena_w, arena_h=spec.arena_h,
        units=units, catalog=catalog, abilities_enabled=spec.abilities_enabled,
        rng_state=rng.state)
