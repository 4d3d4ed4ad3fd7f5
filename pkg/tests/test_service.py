"""HTTP session service: evidence log, queries, explanations, persistence."""

import pytest
from fastapi.testclient import TestClient

from abr.service import create_app


@pytest.fixture
def client():
    return TestClient(create_app())


def bank_session(client):
    resp = client.post("/sessions", json={"baseScenario": "us_bank"})
    assert resp.status_code == 200
    return resp.json()["sessionId"]


# ---- session lifecycle -------------------------------------------------


def test_create_bare_session(client):
    sid = client.post("/sessions", json={}).json()["sessionId"]
    doc = client.get(f"/sessions/{sid}").json()
    assert doc["sessionId"] == sid
    assert doc["baseScenario"] is None
    assert doc["evidenceLog"] == []
    assert doc["activeFacts"] == []
    assert doc["queryHistory"] == []


def test_scenario_preloads_evidence(client):
    sid = bank_session(client)
    doc = client.get(f"/sessions/{sid}").json()
    assert doc["baseScenario"] == "us_bank"
    assert len(doc["activeFacts"]) == 6
    assert "imposedSanc(usa, iran, [2012, 2])" in doc["activeFacts"]
    assert [row["seq"] for row in doc["evidenceLog"]] == [1, 2, 3, 4, 5, 6]


def test_unknown_scenario_is_400(client):
    assert client.post("/sessions", json={"baseScenario": "roswell"}).status_code == 400


def test_unknown_session_is_404(client):
    assert client.get("/sessions/nope").status_code == 404
    assert client.post("/sessions/nope/query",
                       json={"goal": "p(a)"}).status_code == 404
    assert client.post("/sessions/nope/evidence",
                       json={"fact": "p(a)"}).status_code == 404


def test_scenario_directory(client):
    doc = client.get("/scenarios").json()
    names = [s["name"] for s in doc["scenarios"]]
    assert names == ["us_bank", "stuxnet", "sony", "conficker"]
    for s in doc["scenarios"]:
        assert s["notes"]
        assert s["evidenceFacts"]


# ---- evidence log ------------------------------------------------------


def test_evidence_assert_and_retract_roundtrip(client):
    sid = bank_session(client)
    seq = client.post(f"/sessions/{sid}/evidence",
                      json={"fact": "claimResp(izzAdDin, usBHack)"}).json()["seq"]
    assert seq == 7
    doc = client.get(f"/sessions/{sid}").json()
    assert "claimResp(izzAdDin, usBHack)" in doc["activeFacts"]

    resp = client.delete(f"/sessions/{sid}/evidence/{seq}")
    assert resp.status_code == 200
    assert resp.json()["retracted"] == seq
    doc = client.get(f"/sessions/{sid}").json()
    assert "claimResp(izzAdDin, usBHack)" not in doc["activeFacts"]
    # the log keeps both rows; nothing is erased
    assert [row["op"] for row in doc["evidenceLog"]][-2:] == ["assert", "retract"]


def test_retract_inactive_seq_is_404(client):
    sid = bank_session(client)
    seq = client.post(f"/sessions/{sid}/evidence",
                      json={"fact": "p(a)"}).json()["seq"]
    client.delete(f"/sessions/{sid}/evidence/{seq}")
    assert client.delete(f"/sessions/{sid}/evidence/{seq}").status_code == 404
    assert client.delete(f"/sessions/{sid}/evidence/999").status_code == 404


def test_evidence_parse_error_reports_position(client):
    sid = bank_session(client)
    resp = client.post(f"/sessions/{sid}/evidence", json={"fact": "country(Iran"})
    assert resp.status_code == 422
    detail = resp.json()["detail"]
    assert detail["error"] == "parseError"
    assert detail["line"] == 1
    assert detail["col"] >= 1


def test_evidence_must_be_ground(client):
    sid = bank_session(client)
    resp = client.post(f"/sessions/{sid}/evidence", json={"fact": "country(X)"})
    assert resp.status_code == 422
    assert resp.json()["detail"]["error"] == "badFact"


def test_evidence_reserved_predicate_rejected(client):
    sid = bank_session(client)
    resp = client.post(f"/sessions/{sid}/evidence",
                       json={"fact": "dateApplicable([2012, 1], [2012, 1])"})
    assert resp.status_code == 422
    assert resp.json()["detail"]["error"] == "badFact"


def test_retract_restores_prior_answers(client):
    control = bank_session(client)
    base = client.post(f"/sessions/{control}/query",
                       json={"goal": "isCulprit(X, usBHack)"}).json()

    sid = bank_session(client)
    seq = client.post(f"/sessions/{sid}/evidence",
                      json={"fact": "claimResp(izzAdDin, usBHack)"}).json()["seq"]
    widened = client.post(f"/sessions/{sid}/query",
                          json={"goal": "isCulprit(X, usBHack)"}).json()
    assert len(widened["answers"]) > len(base["answers"])

    client.delete(f"/sessions/{sid}/evidence/{seq}")
    narrowed = client.post(f"/sessions/{sid}/query",
                           json={"goal": "isCulprit(X, usBHack)"}).json()
    assert narrowed["answers"] == base["answers"]
    assert narrowed["hints"] == base["hints"]


# ---- queries ------------------------------------------------------------


def test_query_answers_us_bank(client):
    sid = bank_session(client)
    doc = client.post(f"/sessions/{sid}/query",
                      json={"goal": "isCulprit(X, usBHack)"}).json()
    assert doc["qid"] == "q1"
    assert doc["goal"] == "isCulprit(X, usBHack)"
    assert doc["watermark"] == 6
    assert len(doc["answers"]) == 1
    answer = doc["answers"][0]
    assert answer["binding"] == {"X": "iran"}
    assert answer["status"] == "sceptical"
    assert answer["hypotheses"] == ["specificTarget(usBHack)"]
    assert doc["hints"] == []  # a sceptical answer suppresses hints
    history = client.get(f"/sessions/{sid}").json()["queryHistory"]
    assert [h["qid"] for h in history] == ["q1"]
    assert len(history[0]["digest"]) == 64


def test_query_parse_error_is_422(client):
    sid = bank_session(client)
    resp = client.post(f"/sessions/{sid}/query", json={"goal": "p(X), q(X)"})
    assert resp.status_code == 422
    assert resp.json()["detail"]["error"] == "parseError"


def test_query_config_override_echoed(client):
    sid = bank_session(client)
    doc = client.post(f"/sessions/{sid}/query",
                      json={"goal": "isCulprit(X, usBHack)",
                            "config": {"maxDepth": 2}}).json()
    assert doc["config"]["maxDepth"] == 2
    assert doc["answers"] == []  # the culprit chain is deeper than 2


def test_hints_surface_when_nothing_sceptical(client):
    resp = client.post("/sessions", json={"baseScenario": "conficker"})
    sid = resp.json()["sessionId"]
    doc = client.post(f"/sessions/{sid}/query",
                      json={"goal": "isCulprit(X, conficker)"}).json()
    assert doc["answers"]
    assert all(a["status"] != "sceptical" for a in doc["answers"])
    assert doc["hints"]
    hint = doc["hints"][0]
    assert set(hint) == {"kind", "enablingRule", "missing", "wouldConclude"}


def test_queries_see_only_earlier_evidence(client):
    sid = bank_session(client)
    client.post(f"/sessions/{sid}/query", json={"goal": "isCulprit(X, usBHack)"})
    client.post(f"/sessions/{sid}/evidence",
                json={"fact": "claimResp(izzAdDin, usBHack)"})
    doc2 = client.post(f"/sessions/{sid}/query",
                       json={"goal": "isCulprit(X, usBHack)"}).json()
    assert len(doc2["answers"]) == 2
    # q1 recomputes against its own watermark: still a single answer
    assert client.get(f"/sessions/{sid}/explanations/q1?answer=1").status_code == 404
    assert client.get(f"/sessions/{sid}/explanations/q2?answer=1").status_code == 200


# ---- explanations --------------------------------------------------------


def test_explanation_formats(client):
    sid = bank_session(client)
    client.post(f"/sessions/{sid}/query", json={"goal": "isCulprit(X, usBHack)"})

    text = client.get(f"/sessions/{sid}/explanations/q1?format=text")
    assert text.status_code == 200
    assert text.headers["content-type"].startswith("text/plain")
    assert "binding: X = iran" in text.text
    assert "[hypothesized] specificTarget(usBHack)" in text.text

    dot = client.get(f"/sessions/{sid}/explanations/q1?format=dot")
    assert dot.headers["content-type"].startswith("text/vnd.graphviz")
    assert dot.text.startswith("digraph explanation {")

    doc = client.get(f"/sessions/{sid}/explanations/q1?format=json")
    assert doc.headers["content-type"].startswith("application/json")
    body = doc.json()
    assert body["schema"] == "abr-explanation/1"
    assert body["binding"] == {"X": "iran"}


def test_explanation_unknown_bits_are_404(client):
    sid = bank_session(client)
    client.post(f"/sessions/{sid}/query", json={"goal": "isCulprit(X, usBHack)"})
    assert client.get(f"/sessions/{sid}/explanations/q9").status_code == 404
    assert client.get(f"/sessions/{sid}/explanations/q1?answer=5").status_code == 404
    assert client.get(f"/sessions/{sid}/explanations/q1?format=pdf").status_code == 422


# ---- persistence ----------------------------------------------------------


def test_sessions_survive_restart(tmp_path):
    state = str(tmp_path / "state")
    first = TestClient(create_app(state_dir=state))
    sid = first.post("/sessions",
                     json={"baseScenario": "us_bank"}).json()["sessionId"]
    first.post(f"/sessions/{sid}/evidence",
               json={"fact": "claimResp(izzAdDin, usBHack)"})
    original = first.post(f"/sessions/{sid}/query",
                          json={"goal": "isCulprit(X, usBHack)"}).json()
    recorded = first.get(f"/sessions/{sid}").json()

    second = TestClient(create_app(state_dir=state))
    restored = second.get(f"/sessions/{sid}").json()
    assert restored["evidenceLog"] == recorded["evidenceLog"]
    assert restored["activeFacts"] == recorded["activeFacts"]
    assert restored["queryHistory"] == recorded["queryHistory"]

    replayed = second.get(f"/sessions/{sid}/explanations/q1?format=json").json()
    assert replayed["tree"] == original["answers"][0]["tree"]
    assert replayed["status"] == original["answers"][0]["status"]


def test_restart_keeps_sequence_counter(tmp_path):
    state = str(tmp_path / "state")
    first = TestClient(create_app(state_dir=state))
    sid = first.post("/sessions",
                     json={"baseScenario": "us_bank"}).json()["sessionId"]
    second = TestClient(create_app(state_dir=state))
    seq = second.post(f"/sessions/{sid}/evidence",
                      json={"fact": "p(a)"}).json()["seq"]
    assert seq == 7
