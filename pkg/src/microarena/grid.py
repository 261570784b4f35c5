"""Uniform 10x10 spatial grid over the arena rectangle.

Grid coordinates run 1..10 on each axis; cell (1,1) covers the arena's
lower-left corner.  All math is integer milli-units so the round trip
``grid_of(cell_center(c)) == c`` is exact for every cell.
"""

from __future__ import annotations

from .errors import OutOfArena

GRID_SIZE = 10


def grid_of(x_milli: int, y_milli: int, arena_w_milli: int, arena_h_milli: int) -> tuple[int, int]:
    """Cell containing a world position (positions in milli world-units)."""
    if not (0 <= x_milli < arena_w_milli and 0 <= y_milli < arena_h_milli):
        raise OutOfArena(f"({x_milli}, {y_milli}) outside {arena_w_milli}x{arena_h_milli}")
    gx = x_milli * GRID_SIZE // arena_w_milli + 1
    gy = y_milli * GRID_SIZE // arena_h_milli + 1
    return gx, gy


def cell_center(gx: int, gy: int, arena_w_milli: int, arena_h_milli: int) -> tuple[int, int]:
    """World position (milli) of a cell's center."""
    if not (1 <= gx <= GRID_SIZE and 1 <= gy <= GRID_SIZE):
        raise OutOfArena(f"cell ({gx}, {gy}) outside 1..{GRID_SIZE}")
    return ((2 * gx - 1) * arena_w_milli // (2 * GRID_SIZE),
            (2 * gy - 1) * arena_h_milli // (2 * GRID_SIZE))
