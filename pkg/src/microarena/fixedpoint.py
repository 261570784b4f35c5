"""Integer fixed-point helpers used by the battle engine.

The engine never touches floats: world coordinates, hit points, shields and
energy are held in milli-units (1/1000), time in microseconds.  All helpers
here are exact integer arithmetic so traces are bit-identical across
platforms and runs.
"""

from __future__ import annotations

import math
from decimal import Decimal

MILLI = 1000
US_PER_S = 1_000_000

# 2 Hz decisions, 16 Hz physics.
SUBTICKS_PER_DECISION = 8
SUBTICK_US = 62_500
DECISION_US = SUBTICK_US * SUBTICKS_PER_DECISION  # 500 ms
MAX_DECISION_STEPS = 600  # 300 s episode cap


def to_milli(value: int | str | Decimal) -> int:
    """Convert a decimal literal (e.g. "3.15") to exact milli-units.

    Raises ValueError if the value has more than milli resolution, so data
    files cannot silently lose precision.
    """
    d = Decimal(value) if not isinstance(value, Decimal) else value
    scaled = d * MILLI
    if scaled != scaled.to_integral_value():
        raise ValueError(f"{value!r} is finer than milli resolution")
    return int(scaled)


def seconds_to_us(value: int | str | Decimal) -> int:
    d = Decimal(value) if not isinstance(value, Decimal) else value
    scaled = d * US_PER_S
    if scaled != scaled.to_integral_value():
        raise ValueError(f"{value!r} is finer than microsecond resolution")
    return int(scaled)


def milli_to_float(m: int) -> float:
    """Lossy conversion for display and wire encoding only."""
    return m / MILLI


def fmt_milli(m: int) -> str:
    """Render milli-units as a trimmed decimal string: 45000 -> "45", 31500 -> "31.5"."""
    sign = "-" if m < 0 else ""
    m = abs(m)
    whole, frac = divmod(m, MILLI)
    if frac == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:03d}".rstrip("0")


def fmt_us_seconds(us: int) -> str:
    """Microseconds as seconds with a single decimal: 8_250_000 -> "8.3"."""
    tenths = (us + 50_000) // 100_000
    return f"{tenths // 10}.{tenths % 10}"


def tdiv(a: int, b: int) -> int:
    """Division truncating toward zero (Python's // floors toward -inf).

    Movement integration uses this so left/right mirrored setups displace
    symmetrically.
    """
    q = abs(a) // abs(b)
    return -q if (a < 0) != (b < 0) else q


def isqrt(n: int) -> int:
    return math.isqrt(n)


def dist_milli(ax: int, ay: int, bx: int, by: int) -> int:
    """Floor of the Euclidean distance between two milli-unit points."""
    dx = bx - ax
    dy = by - ay
    return math.isqrt(dx * dx + dy * dy)


def dist_sq(ax: int, ay: int, bx: int, by: int) -> int:
    dx = bx - ax
    dy = by - ay
    return dx * dx + dy * dy


def step_per_subtick(speed_milli_per_s: int) -> int:
    """Displacement in milli-units one sub-tick of movement covers."""
    return speed_milli_per_s * SUBTICK_US // US_PER_S


def clamp(v: int, lo: int, hi: int) -> int:
    return lo if v < lo else hi if v > hi else v
