"""Deterministic fixed-timestep battle engine.

Each decision step (2 Hz) installs the submitted orders for both teams, then
advances exactly eight 62.5 ms sub-ticks of physics: timers, movement,
attacks, splash, healing, deaths.  All state lives in integer fixed point
(milli-units / microseconds); identical (scenario, seed, action sequences)
produce bit-identical traces.

A BattleState is confined to one thread of control at a time.  Distinct
battles share nothing mutable and may run fully in parallel.

Rules the stat sheet does not encode, fixed here:

* Damage per hit is ``max(0.5, base + bonus - armor)``; a target with any
  shields up takes the whole hit at shield armor 0, and the hit spills from
  shields into health without re-applying armor.
* Units act strictly by ascending uid within a sub-tick; damage lands
  immediately, so a unit killed early in a sub-tick no longer acts or takes
  further hits ("dead units hold no order and receive no damage").
* No auto-acquired attacks: a unit without an order stands idle.  The one
  innate behavior is healer auto-heal (most damaged biological ally in
  range), which runs regardless of the scenario's ability toggle.
* Units never collide; positions clamp to the arena rectangle.
* Death-triggered splash (Baneling) detonates as the unit's attack: the
  attacker destroys itself and the circle delivers the damage.
* Stimpack's health cost counts as self-damage in the conservation ledger.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .actions import (Ability, Action, Attack, DIRECTIONS, GRID_MAX, GRID_MIN,
                      MoveDir, MoveGrid)
from .errors import CannotTarget
from .fixedpoint import (MAX_DECISION_STEPS, SUBTICK_US, SUBTICKS_PER_DECISION,
                         US_PER_S, clamp, dist_sq, isqrt, tdiv)
from .units import UnitCatalog, UnitSpec, Weapon

TEAMS = ("P1", "P2")
DAMAGE_FLOOR = 500  # 0.5 HP in milli

# Per-action rejection reasons returned by apply_step.
DEAD_ACTOR = "DeadActor"
WRONG_TEAM = "WrongTeam"
UNKNOWN_ABILITY = "UnknownAbility"
OUT_OF_GRID = "OutOfGrid"
ABILITY_DISABLED = "AbilityDisabled"
DUPLICATE_ACTOR = "DuplicateActor"

_DIR_VECTORS = {"UP": (0, 1), "RIGHT": (1, 0), "DOWN": (0, -1), "LEFT": (-1, 0)}


@dataclass(slots=True)
class UnitState:
    uid: int
    spec: UnitSpec
    team: str
    x: int                      # milli world-units
    y: int
    health: int                 # milli HP
    shields: int
    energy: int
    cooldown_us: int = 0
    stim_us: int = 0
    blink_cd_us: int = 0
    sieged: bool = False
    transform_us: int = 0
    transform_to_sieged: bool = False
    alive: bool = True
    order: tuple | None = None
    damage_taken: int = 0       # ledger: total applied pool decrements
    healing_received: int = 0   # ledger: total applied pool increments

    @property
    def weapon_ready(self) -> bool:
        return self.cooldown_us <= 0

    def effects(self) -> list[str]:
        out = []
        if self.stim_us > 0:
            out.append(f"stimmed({self.stim_us}us)")
        if self.sieged:
            out.append("sieged")
        if self.blink_cd_us > 0:
            out.append(f"blink_cooldown({self.blink_cd_us}us)")
        if self.transform_us > 0:
            out.append(f"transforming({self.transform_us}us)")
        return out


@dataclass
class BattleState:
    scenario_id: str
    arena_w: int                # milli
    arena_h: int
    units: dict[int, UnitState]
    catalog: UnitCatalog
    abilities_enabled: bool
    rng_state: int
    tick: int = 0
    decision_step: int = 0
    _uid_order: tuple[int, ...] = ()

    def __post_init__(self):
        if not self._uid_order:
            self._uid_order = tuple(sorted(self.units))

    def living(self, team: str | None = None):
        for uid in self._uid_order:
            u = self.units[uid]
            if u.alive and (team is None or u.team == team):
                yield u

    def unit(self, uid: int) -> UnitState | None:
        return self.units.get(uid)

    def clone(self) -> "BattleState":
        units = {
            uid: UnitState(
                uid=u.uid, spec=u.spec, team=u.team, x=u.x, y=u.y,
                health=u.health, shields=u.shields, energy=u.energy,
                cooldown_us=u.cooldown_us, stim_us=u.stim_us,
                blink_cd_us=u.blink_cd_us, sieged=u.sieged,
                transform_us=u.transform_us,
                transform_to_sieged=u.transform_to_sieged, alive=u.alive,
                order=u.order, damage_taken=u.damage_taken,
                healing_received=u.healing_received)
            for uid, u in self.units.items()
        }
        return BattleState(
            scenario_id=self.scenario_id, arena_w=self.arena_w,
            arena_h=self.arena_h, units=units, catalog=self.catalog,
            abilities_enabled=self.abilities_enabled, rng_state=self.rng_state,
            tick=self.tick, decision_step=self.decision_step,
            _uid_order=self._uid_order)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.scenario_id}|{self.arena_w}x{self.arena_h}|"
                 f"t={self.tick}|d={self.decision_step}|r={self.rng_state}|"
                 f"ab={int(self.abilities_enabled)}\n".encode())
        for uid in self._uid_order:
            u = self.units[uid]
            h.update((
                f"{uid},{u.spec.class_name},{u.team},{u.x},{u.y},"
                f"{u.health},{u.shields},{u.energy},{u.cooldown_us},"
                f"{u.stim_us},{u.blink_cd_us},{int(u.sieged)},"
                f"{u.transform_us},{int(u.transform_to_sieged)},"
                f"{int(u.alive)},{u.order!r},{u.damage_taken},"
                f"{u.healing_received}\n").encode())
        return h.hexdigest()


@dataclass(frozen=True)
class EpisodeOutcome:
    result: str                 # Victory | Defeat | Draw | Ongoing
    reward: int                 # +1 / -1 / 0, from P1's perspective
    at_step: int


@dataclass(frozen=True)
class Rejection:
    team: str
    action: Action
    reason: str
    detail: str = ""


@dataclass
class StepResult:
    state: BattleState
    reward: int
    done: bool
    outcome: EpisodeOutcome
    rejections: tuple[Rejection, ...]


def other_team(team: str) -> str:
    return "P2" if team == "P1" else "P1"


# ---------------------------------------------------------------------------
# Weapon / damage arithmetic


def effective_weapon(unit: UnitState, catalog: UnitCatalog) -> Weapon:
    reg = catalog.abilities
    w = reg.sieged_weapon if unit.sieged else unit.spec.weapon
    if unit.stim_us > 0:
        num, den = reg.stim_attack_mult  # attack speed x num/den => cooldown x den/num
        w = Weapon(w.damage, w.bonus, w.bonus_vs,
                   w.cooldown_us * den // num, w.range_milli, w.splash)
    return w


def effective_speed(unit: UnitState, catalog: UnitCatalog) -> int:
    if unit.sieged or unit.transform_us > 0:
        return 0
    speed = unit.spec.movement_speed
    if unit.stim_us > 0:
        num, den = catalog.abilities.stim_move_mult
        speed = speed * num // den
    return speed


def damage_per_hit(weapon: Weapon, attacker_spec: UnitSpec, target: UnitState) -> int:
    """Per-hit pre-application damage in milli HP.

    Raises CannotTarget when the weapon cannot reach the target's layer.
    """
    if not attacker_spec.can_target_layer(target.spec.layer):
        raise CannotTarget(
            f"{attacker_spec.class_name} cannot target {target.spec.layer} "
            f"unit {target.spec.class_name}")
    base = weapon.damage
    if weapon.bonus_vs is not None and weapon.bonus_vs in target.spec.attributes:
        base += weapon.bonus
    armor = 0 if target.shields > 0 else target.spec.armor
    return max(DAMAGE_FLOOR, base - armor)


def compute_damage(attacker: UnitState, target: UnitState,
                   catalog: UnitCatalog) -> int:
    """Damage one hit from the attacker (with active effects) would deal."""
    return damage_per_hit(effective_weapon(attacker, catalog), attacker.spec, target)


def _is_kamikaze(spec: UnitSpec) -> bool:
    return spec.splash is not None and spec.splash.trigger == "death"


def _can_ever_attack(spec: UnitSpec) -> bool:
    return spec.attack_damage > 0 and bool(spec.targets)


# ---------------------------------------------------------------------------
# Engine internals


class _Sim:
    """One decision-step advance; holds transient per-step context."""

    def __init__(self, state: BattleState):
        self.state = state
        self.catalog = state.catalog
        self.death_queue: list[int] = []

    # -- damage / heal application ------------------------------------------

    def apply_damage(self, target: UnitState, amount: int) -> int:
        if not target.alive or amount <= 0:
            return 0
        from_shields = min(target.shields, amount)
        target.shields -= from_shields
        from_health = min(target.health, amount - from_shields)
        target.health -= from_health
        applied = from_shields + from_health
        target.damage_taken += applied
        if target.health <= 0:
            self.kill(target)
        return applied

    def kill(self, unit: UnitState) -> None:
        unit.alive = False
        unit.order = None
        if _is_kamikaze(unit.spec):
            self.death_queue.append(unit.uid)

    def drain_pools(self, unit: UnitState) -> None:
        """Self-destruct: remaining pools are recorded as self-damage."""
        remaining = unit.health + unit.shields
        unit.damage_taken += remaining
        unit.health = 0
        unit.shields = 0
        self.kill(unit)

    # -- splash ---------------------------------------------------------------

    def circle_splash(self, owner_spec: UnitSpec, owner_uid: int, owner_team: str,
                      cx: int, cy: int, weapon: Weapon,
                      exclude_uid: int | None = None) -> None:
        splash = weapon.splash
        for victim in list(self.state.living()):
            if victim.uid == owner_uid or victim.uid == exclude_uid:
                continue
            if not splash.friendly_fire and victim.team == owner_team:
                continue
            if not owner_spec.can_target_layer(victim.spec.layer):
                continue
            d2 = dist_sq(cx, cy, victim.x, victim.y)
            for radius, (num, den) in splash.rings:
                if d2 <= radius * radius:
                    full = damage_per_hit(weapon, owner_spec, victim)
                    self.apply_damage(victim, full * num // den)
                    break

    def line_splash(self, attacker: UnitState, weapon: Weapon,
                    target: UnitState) -> None:
        splash = weapon.splash
        dx = target.x - attacker.x
        dy = target.y - attacker.y
        dist = isqrt(dx * dx + dy * dy)
        if dist == 0:
            return
        half_len = splash.length // 2
        half_wid = splash.width // 2
        for victim in list(self.state.living()):
            if victim.uid in (attacker.uid, target.uid):
                continue
            if not splash.friendly_fire and victim.team == attacker.team:
                continue
            if not attacker.spec.can_target_layer(victim.spec.layer):
                continue
            rx = victim.x - target.x
            ry = victim.y - target.y
            along = tdiv(rx * dx + ry * dy, dist)       # attack axis
            across = tdiv(rx * -dy + ry * dx, dist)     # perpendicular axis
            if abs(along) <= half_wid and abs(across) <= half_len:
                self.apply_damage(victim, damage_per_hit(weapon, attacker.spec, victim))

    def flush_deaths(self) -> None:
        while self.death_queue:
            uid = self.death_queue.pop(0)
            u = self.state.units[uid]
            self.circle_splash(u.spec, uid, u.team, u.x, u.y, u.spec.weapon)

    # -- movement -------------------------------------------------------------

    def move_toward(self, unit: UnitState, tx: int, ty: int) -> bool:
        """Advance one sub-tick toward (tx, ty); True when arrived."""
        step = effective_speed(unit, self.catalog) * SUBTICK_US // US_PER_S
        if step <= 0:
            return False
        dx = tx - unit.x
        dy = ty - unit.y
        d2 = dx * dx + dy * dy
        if d2 == 0:
            return True
        dist = isqrt(d2)
        if dist <= step:
            unit.x, unit.y = tx, ty
        else:
            unit.x += tdiv(dx * step, dist)
            unit.y += tdiv(dy * step, dist)
        self._clamp(unit)
        return unit.x == tx and unit.y == ty

    def move_direction(self, unit: UnitState, direction: str) -> None:
        step = effective_speed(unit, self.catalog) * SUBTICK_US // US_PER_S
        vx, vy = _DIR_VECTORS[direction]
        unit.x += vx * step
        unit.y += vy * step
        self._clamp(unit)

    def _clamp(self, unit: UnitState) -> None:
        unit.x = clamp(unit.x, 0, self.state.arena_w - 1)
        unit.y = clamp(unit.y, 0, self.state.arena_h - 1)

    # -- per-sub-tick phases ----------------------------------------------------

    def tick_timers(self) -> None:
        for uid in self.state._uid_order:
            u = self.state.units[uid]
            if not u.alive:
                continue
            if u.cooldown_us > 0:
                u.cooldown_us = max(0, u.cooldown_us - SUBTICK_US)
            if u.stim_us > 0:
                u.stim_us = max(0, u.stim_us - SUBTICK_US)
            if u.blink_cd_us > 0:
                u.blink_cd_us = max(0, u.blink_cd_us - SUBTICK_US)
            if u.transform_us > 0:
                u.transform_us = max(0, u.transform_us - SUBTICK_US)
                if u.transform_us == 0:
                    u.sieged = u.transform_to_sieged

    def act(self, unit: UnitState) -> None:
        order = unit.order
        if order is None:
            self.auto_heal(unit)
            return
        kind = order[0]
        if kind == "ability":
            self.execute_ability(unit, order[1], order[2], order[3])
            return
        if kind == "attack":
            self.execute_attack(unit, order[1])
            return
        if kind == "movepoint":
            if self.move_toward(unit, order[1], order[2]):
                unit.order = None
            return
        if kind == "movedir":
            self.move_direction(unit, order[1])
            remaining = order[2] - 1
            unit.order = ("movedir", order[1], remaining) if remaining > 0 else None
            return
        if kind == "heal":
            self.execute_heal_order(unit, order[1])
            return
        unit.order = None

    def execute_attack(self, unit: UnitState, target_uid: int) -> None:
        target = self.state.units.get(target_uid)
        if target is None or not target.alive:
            unit.order = None
            return
        if not unit.spec.can_target_layer(target.spec.layer):
            unit.order = None
            return
        if unit.transform_us > 0:
            return  # transforming: hold the order, act when done
        weapon = effective_weapon(unit, self.catalog)
        d2 = dist_sq(unit.x, unit.y, target.x, target.y)
        in_range = d2 <= weapon.range_milli * weapon.range_milli
        if not in_range:
            if unit.sieged:
                return  # immobile; wait for targets to come into range
            self.move_toward(unit, target.x, target.y)
            return
        if unit.cooldown_us > 0:
            return  # hold position between volleys
        if _is_kamikaze(unit.spec):
            self.drain_pools(unit)  # detonation is the attack; splash on death
            return
        tx, ty = target.x, target.y
        self.apply_damage(target, damage_per_hit(weapon, unit.spec, target))
        if weapon.splash is not None and weapon.splash.trigger == "hit":
            if weapon.splash.kind == "circle":
                self.circle_splash(unit.spec, unit.uid, unit.team, tx, ty,
                                   weapon, exclude_uid=target_uid)
            else:
                self.line_splash(unit, weapon, target)
        unit.cooldown_us = weapon.cooldown_us

    def execute_ability(self, unit: UnitState, name: str,
                        target_uid: int | None, target_cell_pos) -> None:
        reg = self.catalog.abilities
        unit.order = None
        if name == "Stimpack":
            if unit.health > reg.stim_health_cost:
                unit.health -= reg.stim_health_cost
                unit.damage_taken += reg.stim_health_cost
                unit.stim_us = reg.stim_duration_us
            return
        if name == "Blink":
            if unit.blink_cd_us > 0 or target_cell_pos is None:
                return
            tx, ty = target_cell_pos
            dx = tx - unit.x
            dy = ty - unit.y
            dist = isqrt(dx * dx + dy * dy)
            if dist > reg.blink_max_distance:
                tx = unit.x + tdiv(dx * reg.blink_max_distance, dist)
                ty = unit.y + tdiv(dy * reg.blink_max_distance, dist)
            unit.x, unit.y = tx, ty
            self._clamp(unit)
            unit.blink_cd_us = reg.blink_cooldown_us
            return
        if name == "SiegeMode":
            if not unit.sieged and unit.transform_us == 0:
                unit.transform_us = reg.siege_transform_us
                unit.transform_to_sieged = True
            return
        if name == "Unsiege":
            if unit.sieged and unit.transform_us == 0:
                unit.transform_us = reg.siege_transform_us
                unit.transform_to_sieged = False
            return
        if name == "Heal":
            if target_uid is not None:
                unit.order = ("heal", target_uid)
                self.execute_heal_order(unit, target_uid)
            return

    def _heal_amount(self, healer: UnitState, target: UnitState) -> int:
        per_energy = self.catalog.abilities.heal_health_per_energy
        rate = healer.spec.heal_rate * SUBTICK_US // US_PER_S
        rate -= rate % per_energy  # keep the energy ledger exact
        desired = min(rate, target.spec.max_health - target.health)
        affordable = healer.energy * per_energy
        healed = min(desired, affordable)
        if healed <= 0:
            return 0
        cost = -(-healed // per_energy)  # ceil
        target.health += healed
        target.healing_received += healed
        healer.energy -= cost
        return healed

    def _heal_target_valid(self, healer: UnitState, target: UnitState | None) -> bool:
        return (target is not None and target.alive and target.uid != healer.uid
                and target.team == healer.team
                and "Biological" in target.spec.attributes)

    def execute_heal_order(self, healer: UnitState, target_uid: int) -> None:
        target = self.state.units.get(target_uid)
        if not self._heal_target_valid(healer, target) or healer.energy <= 0:
            healer.order = None
            return
        if target.health >= target.spec.max_health:
            healer.order = None
            return
        rng = self.catalog.abilities.heal_range
        if dist_sq(healer.x, healer.y, target.x, target.y) > rng * rng:
            self.move_toward(healer, target.x, target.y)
            return
        self._heal_amount(healer, target)

    def auto_heal(self, healer: UnitState) -> None:
        """Innate behavior: idle healers channel on the most damaged
        biological ally within range (missing health desc, uid asc)."""
        if healer.spec.heal_rate <= 0 or healer.energy <= 0:
            return
        rng = self.catalog.abilities.heal_range
        best = None
        best_missing = 0
        for ally in self.state.living(healer.team):
            if ally.uid == healer.uid or "Biological" not in ally.spec.attributes:
                continue
            missing = ally.spec.max_health - ally.health
            if missing <= 0:
                continue
            if dist_sq(healer.x, healer.y, ally.x, ally.y) > rng * rng:
                continue
            if missing > best_missing:
                best, best_missing = ally, missing
        if best is not None:
            self._heal_amount(healer, best)

    def run_subtick(self) -> None:
        self.tick_timers()
        for uid in self.state._uid_order:
            unit = self.state.units[uid]
            if unit.alive:
                self.act(unit)
        self.flush_deaths()
        self.state.tick += 1


# ---------------------------------------------------------------------------
# Public operations


def _grid_cell_center(state: BattleState, gx: int, gy: int) -> tuple[int, int]:
    # Center of a 1..10 grid cell in milli world-units.
    return ((2 * gx - 1) * state.arena_w // 20,
            (2 * gy - 1) * state.arena_h // 20)


def _install_orders(state: BattleState, team: str, actions,
                    rejections: list[Rejection]) -> None:
    seen: set[int] = set()
    for action in actions:
        unit = state.units.get(action.actor)
        if unit is None or not unit.alive:
            rejections.append(Rejection(team, action, DEAD_ACTOR))
            continue
        if unit.team != team:
            rejections.append(Rejection(team, action, WRONG_TEAM))
            continue
        if action.actor in seen:
            rejections.append(Rejection(team, action, DUPLICATE_ACTOR))
            continue
        if isinstance(action, MoveGrid):
            if not (GRID_MIN <= action.x <= GRID_MAX and GRID_MIN <= action.y <= GRID_MAX):
                rejections.append(Rejection(team, action, OUT_OF_GRID))
                continue
            tx, ty = _grid_cell_center(state, action.x, action.y)
            unit.order = ("movepoint", tx, ty)
        elif isinstance(action, MoveDir):
            if action.direction not in DIRECTIONS:
                rejections.append(Rejection(team, action, OUT_OF_GRID,
                                            f"bad direction {action.direction!r}"))
                continue
            unit.order = ("movedir", action.direction, SUBTICKS_PER_DECISION)
        elif isinstance(action, Attack):
            unit.order = ("attack", action.target)
        elif isinstance(action, Ability):
            reg = state.catalog.abilities
            if not reg.known(action.ability) or unit.spec.class_name not in reg.classes_for(action.ability):
                rejections.append(Rejection(team, action, UNKNOWN_ABILITY))
                continue
            if not state.abilities_enabled:
                rejections.append(Rejection(team, action, ABILITY_DISABLED))
                continue
            cell_pos = None
            if action.target_cell is not None:
                cx, cy = action.target_cell
                if not (GRID_MIN <= cx <= GRID_MAX and GRID_MIN <= cy <= GRID_MAX):
                    rejections.append(Rejection(team, action, OUT_OF_GRID))
                    continue
                cell_pos = _grid_cell_center(state, cx, cy)
            unit.order = ("ability", action.ability, action.target_uid, cell_pos)
        else:
            rejections.append(Rejection(team, action, DEAD_ACTOR,
                                        f"unrecognized action {action!r}"))
            continue
        seen.add(action.actor)


def check_termination(state: BattleState) -> EpisodeOutcome:
    p1_alive = any(True for _ in state.living("P1"))
    p2_alive = any(True for _ in state.living("P2"))
    if not p1_alive and not p2_alive:
        result = "Draw"
    elif not p2_alive:
        result = "Victory"
    elif not p1_alive:
        result = "Defeat"
    elif state.decision_step >= MAX_DECISION_STEPS:
        result = "Draw"
    else:
        result = "Ongoing"
    reward = {"Victory": 1, "Defeat": -1}.get(result, 0)
    return EpisodeOutcome(result=result, reward=reward, at_step=state.decision_step)


def apply_step(state: BattleState, actions_p1, actions_p2) -> StepResult:
    """Install both teams' orders, advance one decision step, score it.

    Invalid individual actions are dropped and reported via rejection
    records; they never abort the step.  The state is advanced in place.
    """
    rejections: list[Rejection] = []
    _install_orders(state, "P1", tuple(actions_p1), rejections)
    _install_orders(state, "P2", tuple(actions_p2), rejections)

    sim = _Sim(state)
    for _ in range(SUBTICKS_PER_DECISION):
        sim.run_subtick()
    state.decision_step += 1

    outcome = check_termination(state)
    done = outcome.result != "Ongoing"
    return StepResult(state=state, reward=outcome.reward, done=done,
                      outcome=outcome, rejections=tuple(rejections))


def builtin_opponent(state: BattleState, team: str) -> tuple[Action, ...]:
    """Scripted environment AI: attack the nearest targetable enemy in
    range, otherwise close on it along the dominant axis.  Deterministic;
    re-targets every decision step; distance ties break toward the lowest
    enemy uid."""
    actions: list[Action] = []
    enemies = list(state.living(other_team(team)))
    if not enemies:
        return ()
    for unit in state.living(team):
        if unit.spec.heal_rate > 0:
            act = _builtin_healer(state, unit)
            if act is not None:
                actions.append(act)
            continue
        if not _can_ever_attack(unit.spec):
            continue
        targetable = [e for e in enemies if unit.spec.can_target_layer(e.spec.layer)]
        pool = targetable if targetable else enemies
        nearest = min(pool, key=lambda e: (dist_sq(unit.x, unit.y, e.x, e.y), e.uid))
        if targetable:
            weapon = effective_weapon(unit, state.catalog)
            d2 = dist_sq(unit.x, unit.y, nearest.x, nearest.y)
            if d2 <= weapon.range_milli * weapon.range_milli:
                actions.append(Attack(unit.uid, nearest.uid))
                continue
        direction = _dominant_direction(unit.x, unit.y, nearest.x, nearest.y)
        if direction is not None and effective_speed(unit, state.catalog) > 0:
            actions.append(MoveDir(unit.uid, direction))
    return tuple(actions)


def _builtin_healer(state: BattleState, healer: UnitState) -> Action | None:
    rng = state.catalog.abilities.heal_range
    best = None
    best_key = None
    for ally in state.living(healer.team):
        if ally.uid == healer.uid or "Biological" not in ally.spec.attributes:
            continue
        missing = ally.spec.max_health - ally.health
        if missing <= 0:
            continue
        key = (-missing, ally.uid)
        if best_key is None or key < best_key:
            best, best_key = ally, key
    if best is None:
        return None
    if dist_sq(healer.x, healer.y, best.x, best.y) <= rng * rng:
        return None  # in range: innate auto-heal channels
    return _dominant_move(healer, best.x, best.y)


def _dominant_direction(ax: int, ay: int, bx: int, by: int) -> str | None:
    dx = bx - ax
    dy = by - ay
    if dx == 0 and dy == 0:
        return None
    if abs(dx) >= abs(dy):
        return "RIGHT" if dx > 0 else "LEFT"
    return "UP" if dy > 0 else "DOWN"


def _dominant_move(unit: UnitState, tx: int, ty: int) -> Action | None:
    direction = _dominant_direction(unit.x, unit.y, tx, ty)
    return MoveDir(unit.uid, direction) if direction is not None else None
