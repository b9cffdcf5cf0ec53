"""Integration tests for API endpoints."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from ramplab.config import APP_VERSION
from ramplab.main import app

SMALL_TABLE = {"table_id": 3, "seed": 1, "reps": 2, "n_obs": 200}


@pytest.fixture
def client(results_file):
    """Test client writing to a temporary store."""
    with TestClient(app) as c:
        yield c


@pytest.fixture
def fit_payload():
    rng = np.random.default_rng(0)
    n = 300
    x1 = rng.normal(size=n)
    x2 = (rng.random(n) < 0.5).astype(float)
    y = (0.1 + 0.2 * x1 - 0.3 * x2 + rng.uniform(-0.5, 0.5, n) > 0).astype(float)
    return {
        "data": {"y": y.tolist(), "x1": x1.tolist(), "x2": x2.tolist()},
        "outcome": "y",
        "design": {"regressors": ["x1", "x2"]},
        "estimators": ["ols", "ramp"],
    }


def test_health_check(client):
    response = client.get("/")
    assert response.status_code == 200

    data = response.json()
    assert data["status"] == "healthy"
    assert "timestamp" in data
    assert data["version"] == APP_VERSION


def test_list_tables(client):
    response = client.get("/tables")
    assert response.status_code == 200

    tables = response.json()
    assert [t["table_id"] for t in tables] == [1, 2, 3, 4, 5, 6, 7, 8, 11, 12, 13]
    assert tables[0]["title"].endswith("u ~ U(-0.5, 0.5)")


def test_create_fit(client, fit_payload):
    """Posted data is fitted and reported, not stored."""
    response = client.post("/fits", json=fit_payload)
    assert response.status_code == 200

    data = response.json()
    assert data["n_obs"] == 300
    assert data["columns"] == ["const", "x1", "x2"]
    assert [f["estimator"] for f in data["fits"]] == ["ols", "ramp"]
    ramp = data["fits"][1]
    assert ramp["error"] is None
    assert {a["variable"] for a in ramp["apes"]} == {"x1", "x2"}
    assert client.get("/simulations").json() == []


def test_fit_with_missing_values(client, fit_payload):
    fit_payload["data"]["x1"][0] = None
    response = client.post("/fits", json=fit_payload)

    assert response.status_code == 200
    assert response.json()["n_dropped"] == 1


def test_fit_unknown_column(client, fit_payload):
    fit_payload["design"]["regressors"] = ["x1", "nope"]
    response = client.post("/fits", json=fit_payload)

    assert response.status_code == 422
    assert response.json()["error"] == "MissingColumn"


def test_fit_non_binary_outcome(client, fit_payload):
    fit_payload["data"]["y"][0] = 2.0
    response = client.post("/fits", json=fit_payload)
    assert response.status_code == 422


def test_create_simulation(client):
    response = client.post("/simulations", json=SMALL_TABLE)
    assert response.status_code == 201

    data = response.json()
    assert data["simulation_id"].startswith("sim_")
    report = data["report"]
    assert report["table_id"] == 3
    assert report["reps_completed"] == 2
    assert report["summaries"][0]["estimator"] == "truth"


def test_create_simulation_from_scenario(client):
    payload = {
        "scenario": {"design": "asym", "error_law": "normal", "reps": 2, "n_obs": 200, "seed": 4},
    }
    response = client.post("/simulations", json=payload)

    assert response.status_code == 201
    assert response.json()["report"]["p_band"] is None


@pytest.mark.parametrize(
    "payload",
    [
        {},
        {"table_id": 1, "scenario": {"design": "sym", "error_law": "normal"}},
        {"scenario": {"design": "sym", "error_law": "uniform", "a": 0}},
        {"table_id": 1, "reps": 0},
    ],
)
def test_invalid_simulation_request(client, payload):
    """Requests that fail validation are rejected."""
    response = client.post("/simulations", json=payload)
    assert response.status_code == 422


def test_unknown_table(client):
    response = client.post("/simulations", json={"table_id": 9, "reps": 2})
    assert response.status_code == 422
    assert response.json()["error"] == "UnknownTable"


def test_retrieve_simulation(client):
    simulation_id = client.post("/simulations", json=SMALL_TABLE).json()["simulation_id"]

    response = client.get(f"/simulations/{simulation_id}")
    assert response.status_code == 200
    assert response.json()["simulation_id"] == simulation_id


def test_retrieve_nonexistent_simulation(client):
    response = client.get("/simulations/nonexistent_id")
    assert response.status_code == 404


def test_list_simulations(client):
    client.post("/simulations", json=SMALL_TABLE)
    client.post("/simulations", json=SMALL_TABLE)

    response = client.get("/simulations")
    assert response.status_code == 200
    assert len(response.json()) == 2


def test_delete_simulation(client):
    simulation_id = client.post("/simulations", json=SMALL_TABLE).json()["simulation_id"]

    assert client.delete(f"/simulations/{simulation_id}").status_code == 204
    assert client.get(f"/simulations/{simulation_id}").status_code == 404
    assert client.delete(f"/simulations/{simulation_id}").status_code == 404
