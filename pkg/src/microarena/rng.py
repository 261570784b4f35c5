"""Deterministic 64-bit generator (SplitMix64) for engine-side randomness.

The engine only draws from this for spawn jitter; everything downstream of
instantiation is fully determined by the action stream.  Kept separate from
``random`` so engine determinism never depends on interpreter RNG state.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def next_below(self, n: int) -> int:
        """Uniform-ish draw in [0, n); modulo bias is irrelevant at our ranges."""
        return self.next_u64() % n

    def next_range(self, lo: int, hi: int) -> int:
        """Inclusive integer range."""
        return lo + self.next_below(hi - lo + 1)
