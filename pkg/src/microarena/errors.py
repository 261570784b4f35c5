"""Exception types shared across the package."""

from __future__ import annotations


class MicroArenaError(Exception):
    """Base class for all package errors."""


class SchemaError(MicroArenaError):
    def __init__(self, field: str, reason: str):
        super().__init__(f"{field}: {reason}")
        self.field = field
        self.reason = reason


class MissingClass(MicroArenaError):
    def __init__(self, name: str):
        super().__init__(f"unit class not in catalog: {name}")
        self.name = name


class UnknownScenario(MicroArenaError):
    def __init__(self, scenario_id: str):
        super().__init__(f"unknown scenario: {scenario_id}")
        self.scenario_id = scenario_id


class SpawnOverflow(MicroArenaError):
    """A spawn region cannot hold its unit count at minimum spacing."""


class CannotTarget(MicroArenaError):
    """Attacker's weapon cannot reach the target's layer (ground/air)."""


class OutOfArena(MicroArenaError):
    """Position outside the arena rectangle."""


class ConfigError(MicroArenaError):
    pass


class UnknownClass(MicroArenaError):
    def __init__(self, key: str):
        super().__init__(f"no knowledge entry for class: {key}")
        self.key = key


class DanglingClass(MicroArenaError):
    def __init__(self, name: str):
        super().__init__(f"knowledge references class absent from catalog: {name}")
        self.name = name


class BackendUnavailable(MicroArenaError):
    """A decision backend failed to answer; carries any partial transcript."""

    def __init__(self, message: str, transcript=None):
        super().__init__(message)
        self.transcript = transcript


class TranscriptExhausted(BackendUnavailable):
    """Recorded backend ran out of responses."""


class CorruptReplay(MicroArenaError):
    def __init__(self, step: int, reason: str):
        super().__init__(f"replay corrupt at step {step}: {reason}")
        self.step = step
        self.reason = reason


class ProtocolError(MicroArenaError):
    """Client-side representation of a server error response."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
