import pytest
from fastapi.testclient import TestClient

from main import app

PREFIX = "/api/v1"


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "healthy"


def test_projector_hand_case(client):
    body = {"form": [[2, 1], [1, 1]], "basis": [[1], [0]]}
    response = client.post(f"{PREFIX}/a-space/projector", json=body)
    assert response.status_code == 200
    data = response.json()
    assert data["success"] is True
    assert [pair[0] for pair in data["Q"]["data"]] == pytest.approx([1.0, 0.5, 0.0, 0.0])
    assert data["rank"] == 1


def test_douglas_rejects_indefinite_coefficient(client):
    body = {"A": [[-1, 0], [0, 1]], "B": [[1], [1]]}
    response = client.post(f"{PREFIX}/a-space/douglas", json=body)
    assert response.status_code == 422
    data = response.json()
    assert data["success"] is False
    assert data["error"]["code"] == "not_psd"


def test_krein_forced_instance(client):
    body = {"X": [[0, 1], [1, 0.7]], "P": [[1, 0], [0, 0]], "method": "paper"}
    response = client.post(f"{PREFIX}/krein/extend", json=body)
    assert response.status_code == 200
    data = response.json()
    assert data["method"] == "paper_construction"
    assert abs(data["Z"]["data"][3][0]) < 1e-10


def test_section_too_far_is_a_conflict(client):
    body = {"form": [[1, 0], [0, 1]], "source": [[1]], "T0": [[1], [0]], "T": [[0], [1]]}
    response = client.post(f"{PREFIX}/isometry/section", json=body)
    assert response.status_code == 409
    assert response.json()["error"]["code"] == "too_far"


def test_isometry_check(client):
    body = {"form": [[1, 0], [0, 1]], "T": [[0, 1], [1, 0]]}
    response = client.post(f"{PREFIX}/isometry/check", json=body)
    assert response.status_code == 200
    assert response.json()["isometric"] is True


def test_sequence_demo(client):
    response = client.post(f"{PREFIX}/sequence/demo", json={"K": 10})
    assert response.status_code == 200
    data = response.json()
    assert data["monotone"] is True
    assert data["final_partial_sum"] == pytest.approx(data["closed_form"], rel=1e-9)
    assert set(data["checkpoints"]) == {"1", "10"}


def test_sequence_unknown_operator(client):
    response = client.post(f"{PREFIX}/sequence/adjointability", json={"operator": "nope"})
    assert response.status_code == 422
    assert response.json()["error"]["code"] == "unknown_builtin"


def test_suite_items(client):
    response = client.get(f"{PREFIX}/suite/items")
    assert response.status_code == 200
    assert "krein_extension" in response.json()["items"]
