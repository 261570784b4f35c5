"""Software rasterizer: team-colored unit glyphs, health/shield bars, uid
tags and an optional grid overlay on an RGB canvas.

Rendering is a pure function of (state, config); repeated calls yield
byte-identical arrays, and the PNG encoding is likewise stable.  World
y points up, pixel y points down.

Style table (fixed):
  race glyph   - Terran square, Protoss circle, Zerg triangle
  team palette - P1 steel blue, P2 brick red
  class code   - two-letter abbreviation drawn inside the glyph
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from .engine import BattleState, UnitState
from .errors import ConfigError

MIN_DIM = 128

BACKGROUND = (24, 26, 32)
GRID_COLOR = (48, 52, 60)
TEAM_COLORS = {"P1": (86, 140, 220), "P2": (212, 80, 64)}
HEALTH_FG = (70, 200, 90)
HEALTH_BG = (60, 60, 60)
SHIELD_FG = (120, 180, 255)
TAG_COLOR = (235, 235, 235)

CLASS_CODES = {
    "Marine": "M", "Marauder": "MR", "Medivac": "MV", "SiegeTank": "ST",
    "Reaper": "R", "Ghost": "G", "Hellbat": "HB", "Viking": "VK",
    "Banshee": "BS", "Zealot": "Z", "Stalker": "S", "Immortal": "IM",
    "Archon": "A", "Phoenix": "PX", "Colossus": "C", "Sentry": "SE",
    "Zergling": "ZG", "Baneling": "B", "SpineCrawler": "SC",
    "PhotonCannon": "PC", "WarpPrism": "WP", "Hydralisk": "HY",
}

GLYPH_HALF = 9          # px half-extent of the unit glyph
BAR_HEIGHT = 3
ANNOTATION_MARGIN = 2


@dataclass(frozen=True)
class RenderConfig:
    height: int = 512
    width: int = 512
    show_grid: bool = True
    show_tags: bool = True

    def validate(self) -> "RenderConfig":
        if self.height < MIN_DIM or self.width < MIN_DIM:
            raise ConfigError(f"frame must be at least {MIN_DIM}x{MIN_DIM}")
        return self


@dataclass(frozen=True)
class Annotation:
    """Pixel-space unit annotation: center, class, bounding box, uid tag."""

    p: tuple[int, int]
    c: str
    b: tuple[int, int, int, int]    # x0, y0, x1, y1 inclusive, inside frame
    tag: int


def world_to_pixel(x_milli: int, y_milli: int, state: BattleState,
                   config: RenderConfig) -> tuple[int, int]:
    px = x_milli * config.width // state.arena_w
    py = (config.height - 1) - y_milli * config.height // state.arena_h
    return px, py


def _glyph_box(px: int, py: int) -> tuple[int, int, int, int]:
    return px - GLYPH_HALF, py - GLYPH_HALF, px + GLYPH_HALF, py + GLYPH_HALF


def annotate_units(state: BattleState, config: RenderConfig | None = None) -> list[Annotation]:
    """Ground-truth annotations: one per living unit, box clamped to frame."""
    config = (config or RenderConfig()).validate()
    out = []
    for u in state.living():
        px, py = world_to_pixel(u.x, u.y, state, config)
        x0, y0, x1, y1 = _glyph_box(px, py)
        x0 = max(0, x0 - ANNOTATION_MARGIN)
        y0 = max(0, y0 - ANNOTATION_MARGIN)
        x1 = min(config.width - 1, x1 + ANNOTATION_MARGIN)
        y1 = min(config.height - 1, y1 + ANNOTATION_MARGIN)
        cx = min(max(px, x0), x1)
        cy = min(max(py, y0), y1)
        out.append(Annotation(p=(cx, cy), c=u.spec.class_name,
                              b=(x0, y0, x1, y1), tag=u.uid))
    return out


def _draw_unit(draw: ImageDraw.ImageDraw, u: UnitState, px: int, py: int,
               font, show_tag: bool) -> None:
    color = TEAM_COLORS[u.team]
    box = _glyph_box(px, py)
    race = u.spec.race
    if race == "Terran":
        draw.rectangle(box, fill=color)
    elif race == "Protoss":
        draw.ellipse(box, fill=color)
    else:  # Zerg
        x0, y0, x1, y1 = box
        draw.polygon([(px, y0), (x1, y1), (x0, y1)], fill=color)

    code = CLASS_CODES.get(u.spec.class_name, "?")
    draw.text((px - 3 * len(code), py - 5), code, fill=(0, 0, 0), font=font)

    # Health bar just above the glyph; shield bar above that when shielded.
    bar_w = 2 * GLYPH_HALF
    bx0 = px - GLYPH_HALF
    by = py - GLYPH_HALF - BAR_HEIGHT - 2
    draw.rectangle([bx0, by, bx0 + bar_w, by + BAR_HEIGHT], fill=HEALTH_BG)
    fill_w = u.health * bar_w // u.spec.max_health
    if fill_w > 0:
        draw.rectangle([bx0, by, bx0 + fill_w, by + BAR_HEIGHT], fill=HEALTH_FG)
    if u.spec.max_shields > 0:
        sy = by - BAR_HEIGHT - 1
        draw.rectangle([bx0, sy, bx0 + bar_w, sy + BAR_HEIGHT], fill=HEALTH_BG)
        sfill = u.shields * bar_w // u.spec.max_shields
        if sfill > 0:
            draw.rectangle([bx0, sy, bx0 + sfill, sy + BAR_HEIGHT], fill=SHIELD_FG)

    if show_tag:
        draw.text((px + GLYPH_HALF + 2, py - 5), str(u.uid), fill=TAG_COLOR, font=font)


def render_frame(state: BattleState, config: RenderConfig | None = None) -> np.ndarray:
    """Rasterize the battle state; returns an (H, W, 3) uint8 array."""
    config = (config or RenderConfig()).validate()
    img = Image.new("RGB", (config.width, config.height), BACKGROUND)
    draw = ImageDraw.Draw(img)
    font = ImageFont.load_default()

    if config.show_grid:
        for i in range(1, 10):
            x = i * config.width // 10
            draw.line([(x, 0), (x, config.height - 1)], fill=GRID_COLOR)
            y = i * config.height // 10
            draw.line([(0, y), (config.width - 1, y)], fill=GRID_COLOR)

    for u in state.living():
        px, py = world_to_pixel(u.x, u.y, state, config)
        _draw_unit(draw, u, px, py, font, config.show_tags)

    return np.asarray(img, dtype=np.uint8).copy()


def encode_png(frame: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(frame, "RGB").save(buf, format="PNG")
    return buf.getvalue()


def decode_png(data: bytes) -> np.ndarray:
    return np.asarray(Image.open(io.BytesIO(data)).convert("RGB"), dtype=np.uint8)
