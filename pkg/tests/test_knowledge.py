from __future__ import annotations

import json

import pytest
from hypothesis import given, settings, strategies as st

from microarena.errors import DanglingClass, SchemaError, UnknownClass
from microarena.knowledge import (build_knowledge_context, load_knowledge_base)
from microarena.scenarios import list_scenarios, load_scenario


def test_bundled_base_covers_catalog(store, catalog):
    assert len(store) >= 21
    assert len(store) == len(catalog)


def test_marine_entry_fidelity(store):
    marine = store.retrieve("Marine")
    assert marine.dps == 9.8
    assert {"Hydralisk", "Immortal", "Marauder"} <= set(marine.strong_against)
    assert marine.health == 45
    assert marine.speed == 3.15


def test_retrieve_keyed_identity(store):
    assert store.retrieve("Marine").class_key == "Marine"
    assert store.retrieve("Zergling").class_key == "Zergling"


def test_retrieve_unknown_class(store):
    with pytest.raises(UnknownClass):
        store.retrieve("Dragoon")


def test_retrieve_pure_repeated_lookups(store):
    first = store.retrieve("Stalker")
    for _ in range(1000):
        assert store.retrieve("Stalker") is first


def test_every_scenario_class_retrieves(store):
    for sid, _, _ in list_scenarios():
        spec = load_scenario(sid)
        for group in spec.p1_units + spec.p2_units:
            entry = store.retrieve(group.class_name)
            assert entry.class_key == group.class_name


def _dump_single_file(store, tmp_path, mutate):
    raw = {"version": 1, "entries": {
        key: {"summary": e.summary, "dps": e.dps, "range": e.range,
              "speed": e.speed, "health": e.health,
              "strong_against": list(e.strong_against),
              "weak_against": list(e.weak_against),
              "insights": list(e.insights)}
        for key, e in store.entries.items()}}
    mutate(raw)
    path = tmp_path / "kb.json"
    path.write_text(json.dumps(raw))
    return path


def test_dangling_matchup_rejected(tmp_path, catalog, store):
    path = _dump_single_file(
        store, tmp_path,
        lambda raw: raw["entries"]["Marine"].update(strong_against=["Dragoon"]))
    with pytest.raises(DanglingClass):
        load_knowledge_base(path, catalog)


def test_missing_entry_rejected(tmp_path, catalog, store):
    path = _dump_single_file(
        store, tmp_path, lambda raw: raw["entries"].pop("Zergling"))
    with pytest.raises(SchemaError):
        load_knowledge_base(path, catalog)


def test_per_class_directory_loads(tmp_path, catalog, store):
    # the bundled base itself is the per-class layout
    bundled = load_knowledge_base(None, catalog)
    assert len(bundled) == len(store)
    assert bundled.retrieve("Marine").dps == 9.8


# ---------------------------------------------------------------------------
# Context synthesis


def test_empty_priorities_empty_context(store):
    assert build_knowledge_context([], store) == ""


def test_marine_block_carries_dps(store):
    context = build_knowledge_context(["Marine"], store)
    assert "9.8" in context
    assert context.startswith("### Marine")


def test_rank_order_preserved(store):
    context = build_knowledge_context(["Zergling", "Marine"], store)
    assert context.index("### Zergling") < context.index("### Marine")


def test_duplicate_classes_single_block(store):
    context = build_knowledge_context(["Marine", "Marine"], store)
    assert context.count("### Marine") == 1


def test_truncation_drops_whole_blocks_from_tail(store):
    classes = ["Marine", "Zergling", "Stalker", "Zealot"]
    full = build_knowledge_context(classes, store, max_context_chars=100_000)
    tight_budget = len(build_knowledge_context(["Marine"], store)) + 10
    tight = build_knowledge_context(classes, store, max_context_chars=tight_budget)
    assert tight == build_knowledge_context(["Marine"], store)
    assert len(tight) < len(full)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(
    ["Marine", "Zergling", "Stalker", "Zealot", "Colossus", "Baneling",
     "Medivac", "SiegeTank", "Archon", "Hydralisk"]), max_size=12),
    st.integers(50, 5000))
def test_context_respects_budget(priorities, budget):
    store = load_knowledge_base()
    context = build_knowledge_context(priorities, store, max_context_chars=budget)
    assert len(context) <= budget
