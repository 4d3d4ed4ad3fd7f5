"""Regenerate the recorded service fixtures the vitest suite runs against.

Usage: python3 scripts/record_fixtures.py  (from frontend/)
Talks to the service in-process; no server needs to be running.
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from abr.service import create_app

OUT = Path(__file__).resolve().parents[1] / "test" / "fixtures"


def dump(name: str, payload) -> None:
    path = OUT / f"{name}.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path.name}")


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    client = TestClient(create_app())

    dump("scenarios", client.get("/scenarios").json())

    bank = client.post("/sessions", json={"baseScenario": "us_bank"}).json()["sessionId"]
    dump("us_bank_query", client.post(
        f"/sessions/{bank}/query", json={"goal": "isCulprit(X, usBHack)"}).json())
    dump("us_bank_session", client.get(f"/sessions/{bank}").json())

    conficker = client.post("/sessions", json={"baseScenario": "conficker"}).json()["sessionId"]
    dump("conficker_query", client.post(
        f"/sessions/{conficker}/query", json={"goal": "isCulprit(X, conficker)"}).json())

    empty = client.post("/sessions", json={}).json()["sessionId"]
    dump("empty_query", client.post(
        f"/sessions/{empty}/query", json={"goal": "isCulprit(X, nothing)"}).json())

    bad_fact = client.post(f"/sessions/{bank}/evidence", json={"fact": "country(iran"})
    assert bad_fact.status_code == 422
    dump("parse_error_422", bad_fact.json())

    non_ground = client.post(f"/sessions/{bank}/evidence", json={"fact": "country(X)"})
    assert non_ground.status_code == 422
    dump("bad_fact_422", non_ground.json())

    accepted = client.post(f"/sessions/{bank}/evidence",
                           json={"fact": "claimResp(alQassamCF, usBHack)"})
    dump("evidence_accepted", accepted.json())


if __name__ == "__main__":
    main()
