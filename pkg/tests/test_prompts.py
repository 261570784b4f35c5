from __future__ import annotations

import pathlib

from microarena.knowledge import build_knowledge_context, load_knowledge_base
from microarena.observe import observe
from microarena.parsing import (DEFAULT_PLAN, PriorityAssessment,
                                PriorityEntry, RoleAssignment)
from microarena.pipeline import HistoryBuffer, HistoryEntry
from microarena.prompts import (build_act_bundle, build_analyze_bundle,
                                build_plan_bundle, build_role_bundle)

from .util import make_state

GOLDEN = pathlib.Path(__file__).parent / "golden"


def _fixture():
    st = make_state([("Marine", "P1", 5, 5), ("Medivac", "P1", 4, 6),
                     ("Zergling", "P2", 20, 20), ("Marauder", "P2", 22, 21)])
    obs = observe(st, "P1", include_image=False)
    history = HistoryBuffer()
    history.append(HistoryEntry(
        0, "step 0: P1 2 units (pool 195), P2 2 units (pool 160); "
           "issued: (none); reward 0", (), 0))
    return obs, history


def test_plan_bundle_golden():
    obs, history = _fixture()
    bundle = build_plan_bundle(obs, history, "P1", False)
    assert bundle.stage == "Plan" and bundle.image is None
    assert bundle.text == (GOLDEN / "prompt_plan.txt").read_text()


def test_analyze_bundle_golden():
    obs, history = _fixture()
    bundle = build_analyze_bundle(obs, history, DEFAULT_PLAN, "P1", False)
    assert bundle.text == (GOLDEN / "prompt_analyze.txt").read_text()


def test_role_bundle_golden():
    obs, _ = _fixture()
    bundle = build_role_bundle(obs, "P1", False)
    assert bundle.text == (GOLDEN / "prompt_role.txt").read_text()


def test_act_bundle_golden_all_sections():
    obs, history = _fixture()
    priorities = PriorityAssessment((PriorityEntry(
        class_label="Zergling_1", tag=3, reason="weakest",
        class_name="Zergling"),))
    roles = RoleAssignment({1: "Assault", 2: "Support"})
    ctx = build_knowledge_context(["Zergling"], load_knowledge_base())
    bundle = build_act_bundle(obs, history, "P1", False, plan=DEFAULT_PLAN,
                              priorities=priorities, knowledge=ctx,
                              roles=roles)
    assert bundle.context == ctx
    assert bundle.text == (GOLDEN / "prompt_act.txt").read_text()


def test_act_bundle_omits_disabled_sections():
    obs, history = _fixture()
    bundle = build_act_bundle(obs, history, "P1", False)
    assert "## Priority targets" not in bundle.text
    assert "## Tactical knowledge" not in bundle.text
    assert "## Assigned roles" not in bundle.text
    assert "## Current skill plan" not in bundle.text
    assert "## Command grammar" in bundle.text


def test_multimodal_bundle_carries_png():
    st = make_state([("Marine", "P1", 5, 5), ("Zergling", "P2", 20, 20)])
    obs = observe(st, "P1", include_image=True)
    bundle = build_plan_bundle(obs, HistoryBuffer(), "P1", True)
    assert bundle.image is not None and bundle.image[:8] == b"\x89PNG\r\n\x1a\n"
    assert bundle.image_digest() is not None
