import json
import time
from importlib import resources

import jsonschema
import numpy as np
import pytest
from fastapi.testclient import TestClient

from prefbo.service import SessionManager, ServiceError, create_app


def _schema(name):
    text = resources.files("prefbo.schemas").joinpath(name).read_text()
    return json.loads(text)


DUEL_SCHEMA = _schema("duel_response.v1.json")
STATE_SCHEMA = _schema("session_state.v1.json")
ERROR_SCHEMA = _schema("error.v1.json")
CREATE_SCHEMA = _schema("create_session_request.v1.json")
OUTCOME_SCHEMA = _schema("outcome_request.v1.json")


@pytest.fixture
def client():
    return TestClient(create_app(seed=0))


def _create(client, **body):
    jsonschema.validate(body, CREATE_SCHEMA)
    r = client.post("/sessions", json=body)
    assert r.status_code == 201, r.text
    jsonschema.validate(r.json(), DUEL_SCHEMA)
    return r.json()


def _submit(client, sid, winner, round=None, expect=200):
    body = {"winner": winner}
    if round is not None:
        body["round"] = round
    jsonschema.validate(body, OUTCOME_SCHEMA)
    r = client.post(f"/sessions/{sid}/outcome", json=body)
    assert r.status_code == expect, r.text
    schema = DUEL_SCHEMA if expect == 200 else ERROR_SCHEMA
    jsonschema.validate(r.json(), schema)
    return r.json()


# ---------------------------------------------------------------------------
# creation and validation

def test_create_session_serves_the_first_pair(client):
    doc = _create(client, dimension=2, presentation="point_2d", seed=1)
    assert doc["status"] == "awaiting_feedback"
    assert doc["round"] == 1
    assert doc["recommendation"] is None
    assert len(doc["duel"]["a"]) == 2 and len(doc["duel"]["b"]) == 2


def test_presentation_dimension_rules(client):
    for body, ok in [
        ({"dimension": 3, "presentation": "color_rgb"}, True),
        ({"dimension": 2, "presentation": "color_rgb"}, False),
        ({"dimension": 2, "presentation": "point_2d"}, True),
        ({"dimension": 5, "presentation": "point_2d"}, False),
        ({"dimension": 7, "presentation": "raw_vector"}, True),
    ]:
        r = client.post("/sessions", json=body)
        assert (r.status_code == 201) == ok, body
        if not ok:
            jsonschema.validate(r.json(), ERROR_SCHEMA)


def test_create_rejects_bad_bodies(client):
    for body in [{}, {"dimension": 0}, {"dimension": 2, "bogus": 1},
                 {"dimension": 2, "bounds": [[1.0, 0.0], [0.0, 1.0]]},
                 {"dimension": 2, "bounds": [[0.0, 1.0]]},
                 {"dimension": 2, "init_pairs": 0},
                 {"dimension": 2, "method": "la_ei"},
                 {"dimension": 2, "init_pairs": 5, "max_rounds": 3}]:
        r = client.post("/sessions", json=body)
        assert r.status_code == 400, body
        jsonschema.validate(r.json(), ERROR_SCHEMA)


def test_custom_bounds_are_respected(client):
    doc = _create(client, dimension=1, bounds=[[-5.0, -3.0]], seed=2)
    for side in ("a", "b"):
        assert -5.0 <= doc["duel"][side][0] <= -3.0


def test_unknown_session_is_404(client):
    for r in (client.get("/sessions/zzz"),
              client.get("/sessions/zzz/duel"),
              client.post("/sessions/zzz/outcome", json={"winner": "a"})):
        assert r.status_code == 404
        jsonschema.validate(r.json(), ERROR_SCHEMA)


# ---------------------------------------------------------------------------
# the feedback state machine

def test_round_trip_and_stale_round_rejection(client):
    sid = _create(client, dimension=2, seed=3)["session_id"]
    doc = _submit(client, sid, "a", round=1)
    assert doc["round"] == 2 and doc["status"] == "awaiting_feedback"
    # double submit of round 1 must fail: that duel is already decided
    err = _submit(client, sid, "a", round=1, expect=409)
    assert "stale" in err["error"]
    state = client.get(f"/sessions/{sid}").json()
    assert len(state["history"]) == 1


def test_bad_winner_label(client):
    sid = _create(client, dimension=1, seed=4)["session_id"]
    r = client.post(f"/sessions/{sid}/outcome", json={"winner": "c"})
    assert r.status_code == 400
    jsonschema.validate(r.json(), ERROR_SCHEMA)
    r = client.post(f"/sessions/{sid}/outcome", json={})
    assert r.status_code == 400
    r = client.post(f"/sessions/{sid}/outcome", json={"winner": "a",
                                                      "extra": 1})
    assert r.status_code == 400


def test_finished_sessions_reject_feedback(client):
    sid = _create(client, dimension=1, init_pairs=2, max_rounds=2,
                  seed=5)["session_id"]
    _submit(client, sid, "b", round=1)
    doc = _submit(client, sid, "a", round=2)
    assert doc["status"] == "finished" and doc["duel"] is None
    _submit(client, sid, "a", expect=409)
    duel = client.get(f"/sessions/{sid}/duel").json()
    assert duel["status"] == "finished" and duel["duel"] is None
    assert duel["recommendation"] is not None


def test_recommendation_is_the_latest_winner(client):
    sid = _create(client, dimension=2, init_pairs=3, seed=6)["session_id"]
    for rnd in range(1, 4):
        pend = client.get(f"/sessions/{sid}/duel").json()["duel"]
        doc = _submit(client, sid, "b", round=rnd)
        assert doc["recommendation"] == pend["b"]


def test_history_winner_loser_assignment(client):
    sid = _create(client, dimension=1, init_pairs=2, seed=7)["session_id"]
    pend = client.get(f"/sessions/{sid}/duel").json()["duel"]
    _submit(client, sid, "b", round=1)
    hist = client.get(f"/sessions/{sid}").json()["history"]
    assert hist[0]["winner"] == pend["b"]
    assert hist[0]["loser"] == pend["a"]


# ---------------------------------------------------------------------------
# the optimization loop behind the service

def test_scripted_judge_drives_the_recommendation_up():
    mgr = SessionManager(seed=0)
    doc = mgr.create_session(2, presentation="point_2d", init_pairs=6,
                             seed=11)
    sid = doc["session_id"]
    latencies = []
    for rnd in range(1, 31):
        duel = mgr.pending_duel(sid)["duel"]
        pick = "a" if duel["a"][0] >= duel["b"][0] else "b"
        t0 = time.perf_counter()
        doc = mgr.submit_outcome(sid, pick, round=rnd)
        latencies.append(time.perf_counter() - t0)
        assert doc["status"] == "awaiting_feedback"
    assert doc["recommendation"][0] > 0.75   # top quartile of [0, 1]
    assert max(latencies) < 1.0
    state = mgr.session_state(sid)
    assert len(state["history"]) == 30


def test_posterior_grid_summary_bands():
    mgr = SessionManager(seed=0)
    sid = mgr.create_session(1, init_pairs=3, seed=12)["session_id"]
    for rnd in range(1, 5):
        duel = mgr.pending_duel(sid)["duel"]
        pick = "a" if duel["a"][0] <= duel["b"][0] else "b"
        mgr.submit_outcome(sid, pick, round=rnd)
    state = mgr.session_state(sid)
    post = state["posterior"]
    assert post["shape"] == "grid1d"
    assert len(post["points"]) == len(post["mean"]) == 101
    lower = np.array(post["lower"])
    mean = np.array(post["mean"])
    upper = np.array(post["upper"])
    assert (lower <= mean + 5e-3).all()
    assert (mean <= upper + 5e-3).all()
    assert all(0.0 <= p[0] <= 1.0 for p in post["points"])
    # cached per duel count: identical payload on a second read
    again = mgr.session_state(sid)["posterior"]
    assert again == post


def test_posterior_grid_2d_and_absent_above_2d():
    mgr = SessionManager(seed=0)
    sid = mgr.create_session(2, init_pairs=2, seed=13)["session_id"]
    mgr.submit_outcome(sid, "a", round=1)
    post = mgr.session_state(sid)["posterior"]
    assert post["shape"] == "grid2d" and len(post["points"]) == 441
    sid3 = mgr.create_session(3, init_pairs=2, seed=14)["session_id"]
    mgr.submit_outcome(sid3, "a", round=1)
    assert mgr.session_state(sid3)["posterior"] is None


def test_session_state_validates_schema(client):
    sid = _create(client, dimension=2, init_pairs=2, seed=8)["session_id"]
    _submit(client, sid, "a", round=1)
    state = client.get(f"/sessions/{sid}")
    assert state.status_code == 200
    jsonschema.validate(state.json(), STATE_SCHEMA)


def test_jsonl_log_records_the_session(tmp_path):
    mgr = SessionManager(session_dir=str(tmp_path), seed=0)
    sid = mgr.create_session(1, init_pairs=2, seed=15)["session_id"]
    mgr.submit_outcome(sid, "a", round=1)
    lines = [json.loads(line) for line in
             (tmp_path / f"{sid}.jsonl").read_text().splitlines()]
    events = [line["event"] for line in lines]
    assert events == ["created", "presented", "outcome", "presented"]
    assert lines[0]["dimension"] == 1
    assert lines[2]["winner"] == "a"


def test_concurrent_sessions_are_independent():
    mgr = SessionManager(seed=0)
    a = mgr.create_session(1, init_pairs=2, seed=16)["session_id"]
    b = mgr.create_session(1, init_pairs=2, seed=17)["session_id"]
    mgr.submit_outcome(a, "a", round=1)
    state_b = mgr.session_state(b)
    assert state_b["round"] == 1 and state_b["history"] == []


def test_scripted_api_loop_latency(client):
    # service half of the live-loop check: five post-warmup exchanges,
    # each answered with a fresh pending pair in under a second
    sid = _create(client, dimension=2, init_pairs=6, seed=9)["session_id"]
    for rnd in range(1, 7):
        _submit(client, sid, "a", round=rnd)
    seen = set()
    for rnd in range(7, 12):
        pend = client.get(f"/sessions/{sid}/duel").json()
        assert pend["duel"] is not None
        key = json.dumps(pend["duel"])
        assert key not in seen
        seen.add(key)
        t0 = time.perf_counter()
        doc = _submit(client, sid, "a", round=rnd)
        assert time.perf_counter() - t0 < 1.0
        assert doc["status"] == "awaiting_feedback"
    assert len(seen) == 5
