"""Unit catalog: static combat statistics and the ability registry.

The catalog is loaded from a versioned JSON stat sheet bundled with the
package (``data/units.json``).  All quantities are converted to exact
fixed-point at load time: milli hit-points / world-units, microsecond
cooldowns.  The catalog is immutable after load and safe to share across
threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal
from importlib import resources
from pathlib import Path

from .errors import MissingClass, SchemaError
from .fixedpoint import seconds_to_us, to_milli

RACES = ("Terran", "Protoss", "Zerg")
ATTRIBUTES = ("Light", "Armored", "Biological", "Mechanical", "Massive", "Psionic")
LAYERS = ("Ground", "Air")

REQUIRED_CLASSES = (
    "Marine", "Marauder", "Medivac", "SiegeTank", "Reaper", "Ghost", "Hellbat",
    "Viking", "Banshee", "Zealot", "Stalker", "Immortal", "Archon", "Phoenix",
    "Colossus", "Sentry", "Zergling", "Baneling", "SpineCrawler", "PhotonCannon",
    "WarpPrism",
)


@dataclass(frozen=True)
class SplashSpec:
    """Area damage profile.

    kind "circle": concentric rings of (radius, fraction) around the impact
    point, innermost first; kind "line": a full-damage band perpendicular to
    the attack direction, centered on the target.  trigger "hit" fires on a
    landed attack, "death" when the owner dies.
    """

    kind: str                       # "circle" | "line"
    trigger: str                    # "hit" | "death"
    friendly_fire: bool
    rings: tuple[tuple[int, tuple[int, int]], ...] = ()  # (radius_milli, (num, den))
    length: int = 0                 # line only, milli
    width: int = 0                  # line only, milli


@dataclass(frozen=True)
class Weapon:
    """Effective weapon profile (base or sieged override)."""

    damage: int                     # milli HP per hit
    bonus: int                      # milli HP added when bonus_vs matches
    bonus_vs: str | None
    cooldown_us: int
    range_milli: int
    splash: SplashSpec | None = None


@dataclass(frozen=True)
class UnitSpec:
    class_name: str
    race: str
    max_health: int                 # milli
    max_shields: int
    max_energy: int
    start_energy: int
    armor: int                      # milli per hit
    attack_damage: int
    bonus_damage: int
    bonus_vs: str | None
    attack_cooldown_us: int
    attack_range: int               # milli
    movement_speed: int             # milli per second
    attributes: frozenset[str]
    is_flying: bool
    targets: frozenset[str]
    splash: SplashSpec | None
    abilities: tuple[str, ...]
    heal_rate: int = 0              # milli HP per second, healers only

    @property
    def weapon(self) -> Weapon:
        return Weapon(self.attack_damage, self.bonus_damage, self.bonus_vs,
                      self.attack_cooldown_us, self.attack_range, self.splash)

    @property
    def layer(self) -> str:
        return "Air" if self.is_flying else "Ground"

    def can_target_layer(self, layer: str) -> bool:
        return layer in self.targets


@dataclass(frozen=True)
class AbilityRegistry:
    """Constants for the implemented ability set, keyed by ability id."""

    stim_classes: frozenset[str]
    stim_health_cost: int           # milli
    stim_duration_us: int
    stim_attack_mult: tuple[int, int]   # cooldown is multiplied by den/num
    stim_move_mult: tuple[int, int]
    blink_classes: frozenset[str]
    blink_max_distance: int         # milli
    blink_cooldown_us: int
    heal_classes: frozenset[str]
    heal_range: int                 # milli
    heal_health_per_energy: int
    siege_classes: frozenset[str]
    siege_transform_us: int
    sieged_weapon: Weapon

    _NAMES = ("Stimpack", "Blink", "Heal", "SiegeMode", "Unsiege")

    def known(self, name: str) -> bool:
        return name in self._NAMES

    def classes_for(self, name: str) -> frozenset[str]:
        return {
            "Stimpack": self.stim_classes,
            "Blink": self.blink_classes,
            "Heal": self.heal_classes,
            "SiegeMode": self.siege_classes,
            "Unsiege": self.siege_classes,
        }.get(name, frozenset())


@dataclass(frozen=True)
class UnitCatalog:
    version: int
    specs: dict[str, UnitSpec]
    abilities: AbilityRegistry
    source: str = ""

    def __getitem__(self, class_name: str) -> UnitSpec:
        try:
            return self.specs[class_name]
        except KeyError:
            raise MissingClass(class_name) from None

    def __contains__(self, class_name: str) -> bool:
        return class_name in self.specs

    def __iter__(self):
        return iter(sorted(self.specs))

    def __len__(self) -> int:
        return len(self.specs)


def _parse_splash(raw: dict, where: str) -> SplashSpec:
    kind = raw.get("kind")
    if kind not in ("circle", "line"):
        raise SchemaError(f"{where}.splash.kind", f"unknown kind {kind!r}")
    trigger = raw.get("trigger", "hit")
    if trigger not in ("hit", "death"):
        raise SchemaError(f"{where}.splash.trigger", f"unknown trigger {trigger!r}")
    ff = bool(raw.get("friendly_fire", False))
    if kind == "circle":
        rings = []
        last_r = 0
        for radius, frac in raw["rings"]:
            r = to_milli(radius)
            if r <= last_r:
                raise SchemaError(f"{where}.splash.rings", "radii must increase")
            last_r = r
            num, den = int(frac[0]), int(frac[1])
            rings.append((r, (num, den)))
        return SplashSpec(kind, trigger, ff, rings=tuple(rings))
    return SplashSpec(kind, trigger, ff,
                      length=to_milli(raw["length"]), width=to_milli(raw["width"]))


def _parse_weapon(raw: dict, where: str) -> Weapon:
    splash = _parse_splash(raw["splash"], where) if raw.get("splash") else None
    return Weapon(
        damage=to_milli(raw["attack_damage"]),
        bonus=to_milli(raw.get("bonus_damage", 0)),
        bonus_vs=raw.get("bonus_vs"),
        cooldown_us=seconds_to_us(raw["attack_cooldown"]),
        range_milli=to_milli(raw["attack_range"]),
        splash=splash,
    )


def _parse_unit(name: str, raw: dict, ability_names: set[str]) -> UnitSpec:
    def num(key: str, default=None) -> Decimal:
        if key not in raw:
            if default is None:
                raise SchemaError(f"{name}.{key}", "missing required field")
            return Decimal(default)
        return raw[key]

    race = raw.get("race")
    if race not in RACES:
        raise SchemaError(f"{name}.race", f"unknown race {race!r}")
    attrs = frozenset(raw.get("attributes", ()))
    if not attrs <= set(ATTRIBUTES):
        raise SchemaError(f"{name}.attributes", f"unknown attribute in {sorted(attrs)}")
    targets = frozenset(raw.get("targets", ()))
    if not targets <= set(LAYERS):
        raise SchemaError(f"{name}.targets", f"unknown layer in {sorted(targets)}")
    bonus_vs = raw.get("bonus_vs")
    if bonus_vs is not None and bonus_vs not in ATTRIBUTES:
        raise SchemaError(f"{name}.bonus_vs", f"unknown attribute {bonus_vs!r}")

    max_energy = to_milli(num("max_energy", "0"))
    start_energy = to_milli(num("start_energy", "0")) if "start_energy" in raw else max_energy
    spec = UnitSpec(
        class_name=name,
        race=race,
        max_health=to_milli(num("max_health")),
        max_shields=to_milli(num("max_shields", "0")),
        max_energy=max_energy,
        start_energy=start_energy,
        armor=to_milli(num("armor", "0")),
        attack_damage=to_milli(num("attack_damage", "0")),
        bonus_damage=to_milli(num("bonus_damage", "0")),
        bonus_vs=bonus_vs,
        attack_cooldown_us=seconds_to_us(num("attack_cooldown", "0")),
        attack_range=to_milli(num("attack_range", "0")),
        movement_speed=to_milli(num("movement_speed", "0")),
        attributes=attrs,
        is_flying=bool(raw.get("is_flying", False)),
        targets=targets,
        splash=_parse_splash(raw["splash"], name) if raw.get("splash") else None,
        abilities=tuple(raw.get("abilities", ())),
        heal_rate=to_milli(num("heal_rate", "0")),
    )

    # Cross-field invariants.
    if spec.max_health <= 0:
        raise SchemaError(f"{name}.max_health", "must be > 0")
    if spec.armor < 0 or spec.attack_range < 0 or spec.movement_speed < 0:
        raise SchemaError(name, "armor/range/speed must be >= 0")
    if spec.attack_damage > 0 and spec.attack_cooldown_us <= 0:
        raise SchemaError(f"{name}.attack_cooldown", "must be > 0 for armed units")
    if not 0 <= spec.start_energy <= spec.max_energy:
        raise SchemaError(f"{name}.start_energy", "outside [0, max_energy]")
    for ability in spec.abilities:
        if ability not in ability_names:
            raise SchemaError(f"{name}.abilities", f"{ability!r} not in ability registry")
    return spec


def _parse_abilities(raw: dict) -> AbilityRegistry:
    try:
        stim = raw["Stimpack"]
        blink = raw["Blink"]
        heal = raw["Heal"]
        siege = raw["SiegeMode"]
    except KeyError as exc:
        raise SchemaError("abilities", f"missing registry entry {exc}") from None
    return AbilityRegistry(
        stim_classes=frozenset(stim["classes"]),
        stim_health_cost=to_milli(stim["health_cost"]),
        stim_duration_us=seconds_to_us(stim["duration"]),
        stim_attack_mult=(int(stim["attack_speed_mult"][0]), int(stim["attack_speed_mult"][1])),
        stim_move_mult=(int(stim["move_speed_mult"][0]), int(stim["move_speed_mult"][1])),
        blink_classes=frozenset(blink["classes"]),
        blink_max_distance=to_milli(blink["max_distance"]),
        blink_cooldown_us=seconds_to_us(blink["cooldown"]),
        heal_classes=frozenset(heal["classes"]),
        heal_range=to_milli(heal["range"]),
        heal_health_per_energy=int(heal["health_per_energy"]),
        siege_classes=frozenset(siege["classes"]),
        siege_transform_us=seconds_to_us(siege["transform_time"]),
        sieged_weapon=_parse_weapon(siege["sieged_weapon"], "SiegeMode"),
    )


def load_unit_specs(path: str | Path | None = None) -> UnitCatalog:
    """Load and validate the unit catalog; defaults to the bundled sheet."""
    if path is None:
        text = resources.files("microarena.data").joinpath("units.json").read_text()
        source = "bundled:units.json"
    else:
        text = Path(path).read_text()
        source = str(path)
    # Decimal floats so "3.15" converts to exactly 3150 milli.
    raw = json.loads(text, parse_float=Decimal)

    abilities = _parse_abilities(raw.get("abilities", {}))
    ability_names = {"Stimpack", "Blink", "Heal", "SiegeMode", "Unsiege"}
    specs: dict[str, UnitSpec] = {}
    for name, unit_raw in raw.get("units", {}).items():
        specs[name] = _parse_unit(name, unit_raw, ability_names)

    for required in REQUIRED_CLASSES:
        if required not in specs:
            raise MissingClass(required)
    for cls in abilities.stim_classes | abilities.blink_classes | abilities.heal_classes | abilities.siege_classes:
        if cls not in specs:
            raise MissingClass(cls)
    for cls in abilities.heal_classes:
        if specs[cls].heal_rate <= 0:
            raise SchemaError(f"{cls}.heal_rate", "healer class must declare heal_rate > 0")
    return UnitCatalog(version=int(raw.get("version", 1)), specs=specs,
                       abilities=abilities, source=source)


_default_catalog: UnitCatalog | None = None


def default_catalog() -> UnitCatalog:
    """Process-wide bundled catalog (immutable, lazily loaded)."""
    global _default_catalog
    if _default_catalog is None:
        _default_catalog = load_unit_specs()
    return _default_catalog
