import pytest
from fastapi.testclient import TestClient

from app.main import app
from app.services.graphs import graph6_encode, lattice4


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok", "service": "srgswitch"}


def test_named_graph_summary(client):
    body = client.get("/graphs/sp3").json()
    assert body["n"] == 63
    assert body["rank"] == 6
    assert body["params"] == {"n": 63, "k": 32, "lambda": 16, "mu": 16}
    assert body["ones_in_colspace"] is False


def test_unknown_graph_is_422(client):
    r = client.get("/graphs/petersen")
    assert r.status_code == 422
    assert "petersen" in r.json()["detail"]


def test_rank_from_graph6(client):
    r = client.post("/rank", json={"graph6": graph6_encode(lattice4()).decode("ascii")})
    assert r.status_code == 200
    assert r.json() == {"rank": 6, "ones_in_colspace": True}


def test_graph_input_needs_one_source(client):
    assert client.post("/rank", json={}).status_code == 422
    assert client.post("/rank", json={"name": "k4", "graph6": "C~"}).status_code == 422


def test_malformed_graph6_is_422(client):
    r = client.post("/srg-check", json={"graph6": "C"})
    assert r.status_code == 422


def test_srg_check(client):
    assert client.post("/srg-check", json={"name": "clebsch"}).json() == {
        "params": {"n": 16, "k": 10, "lambda": 6, "mu": 6}
    }
    r = client.post("/srg-check", json={"graph6": "C_"})
    assert r.json() == {"params": None}


def test_gm_switch(client):
    r = client.post("/gm-switch", json={
        "graph": {"name": "sp3"},
        "set": ["100000", "010000", "101000", "011000"],
    })
    assert r.status_code == 200
    body = r.json()
    assert body["rank_before"] == 6
    assert body["delta"] == 2
    assert body["graph"]["rank"] == 8
    assert body["graph"]["params"]["k"] == 32


def test_gm_switch_rejects_invalid_sets(client):
    r = client.post("/gm-switch", json={"graph": {"name": "lattice4"}, "set": ["1,1", "1,2", "1,3", "2,1"]})
    assert r.status_code == 422
    assert "not a GM switching set" in r.json()["detail"]


def test_predict_rank(client):
    r = client.post("/predict-rank", json={"left": {"name": "shrikhande"}, "right": {"name": "2k2"}})
    assert r.json() == {"predicted_rank": 8, "direct_rank": 8, "ones_in_colspace": True}


def test_replay_bundled(client):
    r = client.post("/replay", json={"name": "table2-right"})
    assert r.status_code == 200
    body = r.json()
    assert body["start"] == "g'-3"
    assert body["final_rank"] == 26
    assert body["terminated_by"] == "transcript_complete"
    assert len(body["path"]) == 12
    assert "final_graph" not in body


def test_replay_mismatch_is_422(client):
    transcript = {"start": "sp3", "steps": [{"set": ["100000", "010000", "101000", "011000"], "rank": 10}]}
    r = client.post("/replay", json={"transcript": transcript})
    assert r.status_code == 422
    assert r.json()["detail"] == "step 1: expected 10, observed 8"


def test_replay_by_name_reads_no_server_paths(client, tmp_path):
    secret = tmp_path / "secret.txt"
    secret.write_text("not a transcript")
    existing = client.post("/replay", json={"name": str(secret)})
    missing = client.post("/replay", json={"name": str(tmp_path / "absent.json")})
    assert existing.status_code == missing.status_code == 422
    assert existing.json()["detail"].startswith("invalid transcript name")
    assert missing.json()["detail"].startswith("invalid transcript name")
    assert "not a transcript" not in existing.json()["detail"]


@pytest.mark.parametrize("name", ["../table1", "table1/..", "..", "a b"])
def test_replay_rejects_names_that_are_not_stems(client, name):
    r = client.post("/replay", json={"name": name})
    assert r.status_code == 422
    assert "invalid transcript name" in r.json()["detail"]


def test_replay_unknown_name(client):
    r = client.post("/replay", json={"name": "table9"})
    assert r.status_code == 422
    assert r.json()["detail"].startswith("no transcript named 'table9'")
