from __future__ import annotations

import base64
import threading
import time

import numpy as np
import pytest

from microarena.engine import apply_step, builtin_opponent
from microarena.observe import observe
from microarena.parsing import parse_action_lines
from microarena.render import RenderConfig, decode_png
from microarena.scenarios import instantiate, load_scenario
from microarena.server import ArenaServer, ServerConfig

from .netutil import WireClient


@pytest.fixture(scope="module")
def server():
    srv = ArenaServer(ServerConfig(port=0, step_deadline_s=2.0))
    srv.start_background()
    yield srv
    srv.stop()


@pytest.fixture()
def client(server):
    with WireClient("127.0.0.1", server.port) as c:
        yield c


def _create(client, scenario="3m", seed=7, mode="PvE", team="P1", **extra):
    resp = client.request({"op": "create", "scenario": scenario, "seed": seed,
                           "mode": mode, "team": team, **extra})
    assert resp["ok"], resp
    return resp["session_id"]


# ---------------------------------------------------------------------------
# Protocol shape


def test_create_returns_session(client):
    resp = client.request({"op": "create", "scenario": "3m", "seed": 1})
    assert resp["ok"] is True and resp["session_id"]


def test_create_unknown_scenario(client):
    resp = client.request({"op": "create", "scenario": "not_a_map", "seed": 1})
    assert resp["ok"] is False and resp["code"] == "UNKNOWN_SCENARIO"


def test_malformed_line_keeps_connection_open(client):
    resp = client.send_raw(b"this is not json\n")
    assert resp["ok"] is False and resp["code"] == "BAD_REQUEST"
    resp2 = client.request({"op": "create", "scenario": "3m", "seed": 2})
    assert resp2["ok"] is True


def test_unknown_session(client):
    resp = client.request({"op": "observe", "session_id": "nope"})
    assert resp["ok"] is False and resp["code"] == "UNKNOWN_SESSION"


def test_reset_deterministic_and_sized(client):
    sid = _create(client, seed=9)
    a = client.request({"op": "reset", "session_id": sid})
    b = client.request({"op": "reset", "session_id": sid})
    assert a["ok"] and b["ok"]
    assert a["observation"] == b["observation"]
    obs = a["observation"]
    assert len(obs["units"]) == 6
    image = decode_png(base64.b64decode(obs["image"]))
    assert image.shape == (512, 512, 3)


def test_custom_render_size(client):
    sid = _create(client, render={"height": 256, "width": 256})
    resp = client.request({"op": "reset", "session_id": sid})
    image = decode_png(base64.b64decode(resp["observation"]["image"]))
    assert image.shape == (256, 256, 3)


def test_include_image_false_saves_bytes(client):
    sid = _create(client, include_image=False)
    resp = client.request({"op": "reset", "session_id": sid})
    assert "image" not in resp["observation"]


def test_step_on_finished_session(client):
    sid = _create(client, scenario="3m", seed=3)
    client.request({"op": "reset", "session_id": sid})
    for _ in range(300):
        resp = client.request({"op": "step", "session_id": sid, "team": "P1",
                               "actions": ["Attack 1 4", "Attack 2 4",
                                           "Attack 3 4"],
                               "include_image": False})
        assert resp["ok"], resp
        if resp["done"]:
            break
    assert resp["done"]
    after = client.request({"op": "step", "session_id": sid, "team": "P1",
                            "actions": []})
    assert after["ok"] is False and after["code"] == "SESSION_DONE"


def test_step_reports_rejections(client):
    sid = _create(client, seed=5)
    client.request({"op": "reset", "session_id": sid})
    resp = client.request({"op": "step", "session_id": sid, "team": "P1",
                           "actions": ["Move 1 4 4", "Move 2 99 4", "Garble"],
                           "include_image": False})
    assert resp["ok"]
    assert "Move 1 4 4" in resp["applied"]
    reasons = {r["reason"] for r in resp["rejections"]}
    assert "OutOfGrid" in reasons
    assert resp["reward"] == 0


def test_close_session(client):
    sid = _create(client)
    assert client.request({"op": "close", "session_id": sid})["ok"]
    resp = client.request({"op": "observe", "session_id": sid})
    assert resp["code"] == "UNKNOWN_SESSION"


# ---------------------------------------------------------------------------
# Fidelity: wire observations equal in-process observations


def test_server_matches_in_process_50_steps(server):
    scenario_id, seed = "3m", 21
    script = {
        5: ["Move 1 5 5", "Move 2 5 6", "Move 3 5 4"],
        20: ["Attack 1 4", "Attack 2 4", "Attack 3 4"],
        35: ["Move 1 UP", "Attack 2 5", "Attack 3 5"],
    }

    local = instantiate(load_scenario(scenario_id), seed)
    config = RenderConfig()

    with WireClient("127.0.0.1", server.port) as c:
        sid = _create(c, scenario=scenario_id, seed=seed)
        c.request({"op": "reset", "session_id": sid})
        for step in range(50):
            lines = script.get(step, [])
            resp = c.request({"op": "step", "session_id": sid, "team": "P1",
                              "actions": lines})
            assert resp["ok"], resp

            actions, _ = parse_action_lines("\n".join(lines))
            local_result = apply_step(local, actions,
                                      builtin_opponent(local, "P2"))
            local_obs = observe(local, "P1", config)

            wire_obs = resp["observation"]
            assert wire_obs["text"] == local_obs.text
            assert wire_obs["decision_step"] == local_obs.decision_step
            wire_units = {u["id"]: u for u in wire_obs["units"]}
            for record in local_obs.units:
                assert wire_units[record.id]["status"] == record.status
                assert tuple(wire_units[record.id]["grid"]) == record.grid
            image = decode_png(base64.b64decode(wire_obs["image"]))
            assert np.array_equal(image, local_obs.image)
            assert resp["reward"] == local_result.reward
            assert resp["done"] == local_result.done
            if resp["done"]:
                break


# ---------------------------------------------------------------------------
# PvP barrier


def test_pvp_applies_when_both_submit(server):
    with WireClient("127.0.0.1", server.port) as c1, \
            WireClient("127.0.0.1", server.port) as c2:
        sid = _create(c1, scenario="mixed_units_pvp", mode="PvP", team="P1",
                      include_image=False)
        c1.request({"op": "reset", "session_id": sid})

        result = {}

        def submit_p1():
            result["p1"] = c1.request({"op": "step", "session_id": sid,
                                       "team": "P1", "actions": ["Move 1 5 5"]})

        t = threading.Thread(target=submit_p1)
        t.start()
        time.sleep(0.15)  # P1 now waiting at the barrier
        result["p2"] = c2.request({"op": "step", "session_id": sid,
                                   "team": "P2", "actions": ["Move 6 6 5"]})
        t.join(timeout=5)
        assert result["p1"]["ok"] and result["p2"]["ok"]
        assert result["p1"]["observation"]["decision_step"] == 1
        assert result["p2"]["observation"]["decision_step"] == 1
        # perspectives: rewards negate each other
        assert result["p1"]["reward"] == -result["p2"]["reward"]


def test_pvp_deadline_advances_with_silent_side(server):
    with WireClient("127.0.0.1", server.port) as c:
        sid = _create(c, scenario="mixed_units_pvp", mode="PvP", team="P1",
                      include_image=False, step_deadline_s=0.5)
        c.request({"op": "reset", "session_id": sid})
        start = time.perf_counter()
        resp = c.request({"op": "step", "session_id": sid, "team": "P1",
                          "actions": []})
        elapsed = time.perf_counter() - start
        assert resp["ok"]
        assert resp["observation"]["decision_step"] == 1
        assert 0.4 <= elapsed < 2.0  # deadline fired, not the default 2 s


def test_pvp_duplicate_submit(server):
    with WireClient("127.0.0.1", server.port) as c1, \
            WireClient("127.0.0.1", server.port) as c2:
        sid = _create(c1, scenario="mixed_units_pvp", mode="PvP",
                      include_image=False, step_deadline_s=3.0)
        c1.request({"op": "reset", "session_id": sid})

        first = {}

        def submit():
            first["resp"] = c1.request({"op": "step", "session_id": sid,
                                        "team": "P1", "actions": []})

        t = threading.Thread(target=submit)
        t.start()
        time.sleep(0.15)
        dup = c2.request({"op": "step", "session_id": sid, "team": "P1",
                          "actions": []})
        assert dup["ok"] is False and dup["code"] == "DUPLICATE_SUBMIT"
        # unblock the waiter
        other = c2.request({"op": "step", "session_id": sid, "team": "P2",
                            "actions": []})
        t.join(timeout=5)
        assert other["ok"] and first["resp"]["ok"]


# ---------------------------------------------------------------------------
# Session isolation


def test_concurrent_sessions_isolated(server):
    # N sessions stepped from interleaved threads must match solo traces.
    def solo_trace(seed: int) -> list[str]:
        state = instantiate(load_scenario("3m"), seed)
        digests = []
        for _ in range(5):
            apply_step(state, [], builtin_opponent(state, "P2"))
            digests.append(state.digest())
        return digests

    def run_session(seed: int, out: dict):
        with WireClient("127.0.0.1", server.port) as c:
            sid = _create(c, seed=seed, include_image=False)
            c.request({"op": "reset", "session_id": sid})
            texts = []
            for _ in range(5):
                resp = c.request({"op": "step", "session_id": sid,
                                  "team": "P1", "actions": []})
                texts.append(resp["observation"]["text"])
            out[seed] = texts

    results: dict[int, list[str]] = {}
    threads = [threading.Thread(target=run_session, args=(seed, results))
               for seed in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout=30)

    for seed in range(6):
        state = instantiate(load_scenario("3m"), seed)
        for step, via_wire in enumerate(results[seed]):
            apply_step(state, [], builtin_opponent(state, "P2"))
            assert via_wire == observe(state, "P1", include_image=False).text, \
                f"seed {seed} diverged at step {step}"
