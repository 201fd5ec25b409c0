from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from polyenc import config, main
from polyenc.state import RunHistory


@pytest.fixture
def client(monkeypatch):
    monkeypatch.setattr(main, "history", RunHistory())
    with TestClient(main.app) as c:
        yield c


def lists_text() -> str:
    return (Path(config.CORPUS_DIR) / "lists.p").read_text()


def test_schemes(client):
    res = client.get("/schemes")
    assert res.status_code == 200
    names = [row["name"] for row in res.json()["schemes"]]
    assert len(names) == 19
    assert "mono_g_qq" in names


def test_encode(client):
    res = client.post("/encode", json={"problem": lists_text(), "scheme": "g_qq"})
    assert res.status_code == 200
    data = res.json()
    assert data["scheme"] == "g_qq"
    assert data["added_axioms"] == 2
    assert "fof(ax_guard_mono_list" in data["output"]
    assert data["dropped"] == []


def test_encode_mono_reports_dropped(client):
    res = client.post("/encode", json={"problem": lists_text(), "scheme": "t", "mono": True, "mono_budget": 1})
    assert res.status_code == 200
    assert set(res.json()["dropped"]) == {"exhaust", "sel"}


def test_bad_input_is_400(client):
    res = client.post("/encode", json={"problem": "fof(a, axiom, p(.", "scheme": "g"})
    assert res.status_code == 400
    res = client.post("/encode", json={"problem": lists_text(), "scheme": "nope"})
    assert res.status_code == 400
    res = client.post("/encode", json={"scheme": "g"})
    assert res.status_code == 400


def test_upload_then_encode(client):
    res = client.post("/upload", files={"file": ("lists.p", lists_text().encode(), "text/plain")})
    assert res.status_code == 200
    problem_id = res.json()["problem_id"]
    res = client.post("/encode", json={"problem_id": problem_id, "scheme": "t_q"})
    assert res.status_code == 200
    assert client.post("/encode", json={"problem_id": "unknown", "scheme": "t_q"}).status_code == 400


def test_analyze_monomorphise_stats_check(client):
    problem = lists_text()
    report = client.post("/analyze", json={"problem": problem}).json()
    assert report["U"] == ["list(A)"]
    mono = client.post("/monomorphise", json={"problem": problem}).json()
    assert mono["rounds"] == 2
    monkey = (Path(config.CORPUS_DIR) / "monkey_village.p").read_text()
    stats = client.post("/stats", json={"problem": monkey}).json()
    assert stats["clauses"] == 4
    check = client.post("/check", json={"problem": monkey, "expect": "sat:3"}).json()
    assert check["verdict"] == "pass"


def test_runs_are_recorded(client):
    client.post("/encode", json={"problem": lists_text(), "scheme": "t"})
    client.post("/encode", json={"problem": "bad", "scheme": "t"})
    runs = client.get("/runs").json()["runs"]
    assert [(r["command"], r["ok"]) for r in runs] == [("encode", True), ("encode", False)]
    assert runs[0]["summary"]["scheme"] == "t"
    assert len(client.get("/runs", params={"limit": 1}).json()["runs"]) == 1
