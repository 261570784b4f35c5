from __future__ import annotations

import numpy as np
import pytest

from microarena.actions import Attack
from microarena.describe import describe_state, unit_labels
from microarena.engine import apply_step
from microarena.errors import ConfigError
from microarena.observe import observe, unit_records
from microarena.render import (RenderConfig, annotate_units, decode_png,
                               encode_png, render_frame, world_to_pixel)
from microarena.scenarios import instantiate, load_scenario

from .util import make_state


# ---------------------------------------------------------------------------
# Text description


def test_describe_contains_labels_and_tags():
    st = make_state([("Marine", "P1", 5, 5), ("Marine", "P1", 6, 5),
                     ("Marine", "P2", 20, 20)])
    text = describe_state(st, "P1")
    assert "You are P1" in text
    assert "Marine_1 (Tag: 1)" in text
    assert "Marine_2 (Tag: 2)" in text
    assert "[P2 units]" in text and "Marine_1 (Tag: 3)" in text


def test_describe_line_format_with_pools():
    st = make_state([("Stalker", "P1", 16, 16), ("Medivac", "P2", 20, 20)])
    text = describe_state(st, "P1")
    assert "Stalker_1 (Tag: 1) at grid (6,6), HP 80/80, shields 80/80, weapon ready" in text
    assert "Medivac_1 (Tag: 2) at grid (7,7), HP 150/150, energy 50/200, weapon ready" in text


def test_describe_deterministic_and_skips_dead():
    st = make_state([("Marine", "P1", 5, 5), ("Marine", "P2", 20, 20)])
    st.units[2].alive = False
    st.units[2].health = 0
    a = describe_state(st, "P1")
    b = describe_state(st, "P1")
    assert a == b
    assert "(Tag: 2)" not in a
    assert "P2 army: 0 units" in a


def test_describe_golden_3m(tmp_path):
    st = instantiate(load_scenario("3m"), 7)
    import pathlib
    golden = pathlib.Path(__file__).parent / "golden" / "describe_3m_seed7.txt"
    text = describe_state(st, "P1")
    assert text == golden.read_text()


def test_labels_are_per_team_per_class():
    st = make_state([("Marine", "P1", 5, 5), ("Zealot", "P1", 6, 5),
                     ("Marine", "P2", 20, 20), ("Marine", "P2", 21, 20)])
    labels = unit_labels(st)
    assert labels == {1: "Marine_1", 2: "Zealot_1", 3: "Marine_1", 4: "Marine_2"}


# ---------------------------------------------------------------------------
# Rendering


def test_render_requires_min_size():
    st = make_state([("Marine", "P1", 5, 5)])
    with pytest.raises(ConfigError):
        render_frame(st, RenderConfig(height=64, width=512))


def test_render_byte_identical():
    st = instantiate(load_scenario("mixed_units"), 3)
    a = render_frame(st)
    b = render_frame(st)
    assert np.array_equal(a, b)
    assert encode_png(a) == encode_png(b)


def test_marine_at_center_renders_centered():
    st = make_state([("Marine", "P1", 16, 16)], arena=32.0)
    frame = render_frame(st, RenderConfig(show_grid=False, show_tags=False))
    px, py = world_to_pixel(16_000, 16_000, st, RenderConfig())
    assert abs(px - 256) <= 1 and abs(py - 256) <= 1
    # the team-colored glyph covers the center
    patch = frame[py - 2:py + 3, px - 2:px + 3]
    assert (patch == (86, 140, 220)).all(axis=-1).any()


def test_health_bar_half_width():
    st = make_state([("Marine", "P1", 16, 16)], arena=32.0)
    st.units[1].health = 22_500  # 50%
    cfg = RenderConfig(show_grid=False, show_tags=False)
    frame = render_frame(st, cfg)
    px, py = world_to_pixel(16_000, 16_000, st, cfg)
    bar_row = py - 9 - 3  # glyph half 9, bar height 3, 2px gap -> inside bar
    row = frame[bar_row - 1]
    green = np.all(row == (70, 200, 90), axis=-1)
    filled = int(green.sum())
    assert abs(filled - 9) <= 2  # half of the 18 px bar, +/- rounding


def test_empty_arena_renders_grid_only():
    st = make_state([("Marine", "P1", 5, 5)])
    st.units[1].alive = False
    st.units[1].health = 0
    frame = render_frame(st)
    colors = np.unique(frame.reshape(-1, 3), axis=0)
    assert len(colors) == 2  # background + grid lines


def test_png_round_trip():
    st = instantiate(load_scenario("3m"), 1)
    frame = render_frame(st)
    assert np.array_equal(decode_png(encode_png(frame)), frame)


# ---------------------------------------------------------------------------
# Annotations


def test_annotations_one_per_living_unit():
    st = instantiate(load_scenario("3m"), 0)
    anns = annotate_units(st)
    assert len(anns) == 6
    assert sorted(a.tag for a in anns) == [1, 2, 3, 4, 5, 6]


def test_annotation_boxes_inside_frame_and_contain_center():
    st = make_state([("Marine", "P1", 0.1, 0.1), ("Marine", "P2", 31.9, 31.9)])
    for a in annotate_units(st):
        x0, y0, x1, y1 = a.b
        assert 0 <= x0 <= x1 <= 511 and 0 <= y0 <= y1 <= 511
        assert x0 <= a.p[0] <= x1 and y0 <= a.p[1] <= y1


def test_annotation_centers_match_projection():
    st = instantiate(load_scenario("mixed_units"), 5)
    cfg = RenderConfig()
    by_tag = {a.tag: a for a in annotate_units(st, cfg)}
    for u in st.living():
        px, py = world_to_pixel(u.x, u.y, st, cfg)
        a = by_tag[u.uid]
        assert abs(a.p[0] - px) <= 1 and abs(a.p[1] - py) <= 1


# ---------------------------------------------------------------------------
# Observation assembly


def test_observe_composes_counts():
    st = instantiate(load_scenario("3m"), 0)
    obs = observe(st, "P1")
    assert len(obs.units) == 6
    assert len(obs.annotations) == 6
    assert obs.image is not None and obs.image.shape == (512, 512, 3)
    assert obs.decision_step == 0


def test_observe_after_death_drops_unit_everywhere():
    st = instantiate(load_scenario("3m"), 0)
    # march P1's marine onto the enemy and kill one
    victim = 4
    while st.units[victim].alive:
        apply_step(st, (Attack(1, victim), Attack(2, victim), Attack(3, victim)), ())
    obs = observe(st, "P1")
    assert len(obs.units) == 5
    assert len(obs.annotations) == 5
    assert victim not in {a.tag for a in obs.annotations}
    assert f"(Tag: {victim})" not in obs.text


def test_observe_without_image():
    st = instantiate(load_scenario("3m"), 0)
    obs = observe(st, "P2", include_image=False)
    assert obs.image is None
    assert obs.height == 512 and obs.width == 512


def test_every_text_tag_has_exactly_one_record():
    import re
    st = instantiate(load_scenario("mixed_units"), 2)
    obs = observe(st, "P1", include_image=False)
    text_tags = [int(m) for m in re.findall(r"\(Tag: (\d+)\)", obs.text)]
    record_ids = [r.id for r in obs.units]
    assert sorted(text_tags) == sorted(record_ids)
    assert len(set(record_ids)) == len(record_ids)


def test_unit_records_grid_matches_position():
    from microarena.grid import grid_of
    st = instantiate(load_scenario("2c_vs_64zg"), 4)
    for r in unit_records(st):
        x, y = int(round(r.pos[0] * 1000)), int(round(r.pos[1] * 1000))
        assert r.grid == grid_of(x, y, st.arena_w, st.arena_h)
