"""HTTP facade over sessions, exercised with the in-process test client."""

import pytest
from fastapi.testclient import TestClient

from lineal.service import SessionStore, create_app

from conftest import MAVG_CSV, MAVG_PROGRAM, read


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(session_cap=4))


@pytest.fixture(scope="module")
def mavg(client):
    """A created mavg session: (id, create-response body)."""
    res = client.post(
        "/sessions",
        json={"source": read(MAVG_PROGRAM), "datasets": {"data": read(MAVG_CSV)}},
    )
    assert res.status_code == 200
    body = res.json()
    return body["id"], body


def test_create_returns_view_and_input_map(mavg):
    _, body = mavg
    (chart,) = body["view"]["charts"]
    assert chart["kind"] == "line"
    assert [(p["y"], p["addr"]) for p in chart["points"]] == [
        (20.15, 52),
        (25.813333333333333, 58),
        (40.18, 64),
    ]
    (table,) = body["view"]["tables"]
    assert table["columns"] == ["emissions"]
    cells = {e["path"]: e["addr"] for e in body["inputs"] if e["kind"] == "cell"}
    assert cells == {
        "data[0].emissions": 0,
        "data[1].emissions": 2,
        "data[2].emissions": 4,
        "data[3].emissions": 6,
    }


def test_query_forward_from_an_input_cell(client, mavg):
    sid, _ = mavg
    res = client.post(
        f"/sessions/{sid}/query",
        json={"op": "demandedBy", "selection": [4], "restrict": "outputs"},
    )
    assert res.status_code == 200
    assert res.json() == {"selection": [58, 64]}


def test_query_linked_inputs(client, mavg):
    sid, _ = mavg
    res = client.post(
        f"/sessions/{sid}/query",
        json={"op": "linkedInputs", "selection": [4], "restrict": "inputs"},
    )
    assert res.json() == {"selection": [0, 2, 4, 6]}


def test_query_backward_from_an_output(client, mavg):
    sid, _ = mavg
    res = client.post(
        f"/sessions/{sid}/query",
        json={"op": "demands", "selection": [52], "restrict": "inputs"},
    )
    assert res.json() == {"selection": [0, 2]}


def test_graph_endpoint(client, mavg):
    sid, _ = mavg
    res = client.get(f"/sessions/{sid}/graph")
    assert res.status_code == 200
    body = res.json()
    assert len(body["vertices"]) == 72
    assert len(body["edges"]) == 55
    assert body["labels"]["0"] == "18.17"
    assert body["labels"]["16"] == "<fun>"


def test_unknown_session_is_404(client):
    assert client.get("/sessions/nope/graph").status_code == 404
    res = client.post(
        "/sessions/nope/query", json={"op": "demands", "selection": []}
    )
    assert res.status_code == 404


def test_unknown_op_lists_the_known_ones(client, mavg):
    sid, _ = mavg
    res = client.post(f"/sessions/{sid}/query", json={"op": "slice", "selection": []})
    assert res.status_code == 422
    detail = res.json()["detail"]
    assert "unknown op" in detail["message"]
    assert "demandedBy" in detail["ops"] and "suffices" in detail["ops"]


def test_boundary_violations_are_422(client, mavg):
    sid, _ = mavg
    res = client.post(
        f"/sessions/{sid}/query", json={"op": "demands", "selection": [0]}
    )
    assert res.status_code == 422  # demands starts from sinks, 0 is a source
    res = client.post(
        f"/sessions/{sid}/query",
        json={"op": "demandedBy", "selection": [4], "restrict": "everything"},
    )
    assert res.status_code == 422


def test_parse_errors_come_back_with_positions(client):
    res = client.post("/sessions", json={"source": "def x = ;"})
    assert res.status_code == 400
    assert res.json()["detail"] == {
        "message": "expected an expression, found ';'",
        "line": 1,
        "col": 9,
    }


def test_clause_problems_come_back_with_positions(client):
    src = "def foo (Cons y ys) (Cons z zs) = 1;\ndef foo x Nil = 2;\nfoo [] []"
    res = client.post("/sessions", json={"source": src})
    assert res.status_code == 400
    detail = res.json()["detail"]
    assert "argument 1 aligns" in detail["message"]
    assert (detail["line"], detail["col"]) == (1, 10)


def test_dataset_mismatch_is_400(client):
    res = client.post("/sessions", json={"source": "dataset data;\n1"})
    assert res.status_code == 400
    assert "declared but not provided" in res.json()["detail"]["message"]


def test_json_datasets_pass_through(client):
    res = client.post(
        "/sessions",
        json={"source": "dataset nums;\nnums", "datasets": {"nums": [1, 2]}},
    )
    assert res.status_code == 200
    (chart,) = res.json()["view"]["charts"]
    assert [p["y"] for p in chart["points"]] == [1, 2]


def test_store_evicts_least_recently_used():
    store = SessionStore(cap=2)
    a = store.put("A")
    b = store.put("B")
    assert store.get(a) == "A"  # touch A so B is now oldest
    c = store.put("C")
    assert store.get(b) is None
    assert store.get(a) == "A" and store.get(c) == "C"
    assert len(store) == 2
    with pytest.raises(ValueError):
        SessionStore(cap=0)


def test_cors_headers_for_browser_clients(client):
    res = client.get(
        "/sessions/nope/graph", headers={"Origin": "http://localhost:5173"}
    )
    assert res.headers.get("access-control-allow-origin") == "*"
