"""
Tests for the HTTP service
"""
import pytest
from fastapi import status

from tests.conftest import scenario_document


def test_health(client):
    """Test health check endpoint"""
    response = client.get("/health")
    assert response.status_code == status.HTTP_200_OK
    data = response.json()
    assert data["status"] == "healthy"
    assert "version" in data


class TestOracleEndpoint:
    """Test allocation endpoint"""

    def test_three_connection_example(self, client):
        payload = {
            "requirements": [
                {"min_rate": 20e6, "max_rate": 30e6},
                {"min_rate": 40e6, "max_rate": 60e6},
                {"min_rate": 60e6, "max_rate": 90e6},
            ],
            "capacity": 170e6,
        }
        response = client.post("/api/v1/oracle/allocate", json=payload)
        assert response.status_code == status.HTTP_200_OK
        data = response.json()
        assert data["hrf"]["theta"] == pytest.approx(5 / 6)
        assert sum(data["mmf"]["rates"]["rates"]) == pytest.approx(170e6)

    def test_degenerate_requirement(self, client):
        payload = {"requirements": [{"min_rate": 5, "max_rate": 5}], "capacity": 10}
        response = client.post("/api/v1/oracle/allocate", json=payload)
        assert response.status_code == status.HTTP_422_UNPROCESSABLE_ENTITY
        assert "max_rate" in response.json()["error"]

    def test_missing_capacity(self, client):
        response = client.post("/api/v1/oracle/allocate", json={"requirements": []})
        assert response.status_code == status.HTTP_422_UNPROCESSABLE_ENTITY
        assert response.json()["details"]


class TestScenarioEndpoints:
    """Test scenario endpoints"""

    def test_bundled(self, client):
        response = client.get("/api/v1/scenarios/bundled")
        assert response.status_code == status.HTTP_200_OK
        assert "three-connection" in response.json()["scenarios"]

    def test_validate_valid(self, client):
        response = client.post("/api/v1/scenarios/validate", json=scenario_document())
        assert response.json() == {"valid": True, "errors": []}

    def test_validate_invalid(self, client):
        document = scenario_document()
        document["connections"][0]["id"] = "high"
        response = client.post("/api/v1/scenarios/validate", json=document)
        assert response.status_code == status.HTTP_200_OK
        assert response.json()["valid"] is False
        assert response.json()["errors"]

    def test_run(self, client):
        response = client.post("/api/v1/scenarios/run", json=scenario_document(duration=0.5))
        assert response.status_code == status.HTTP_200_OK
        data = response.json()
        assert data["scenario"] == "small"
        assert [c["conn_id"] for c in data["connections"]] == ["low", "high"]

    def test_run_invalid(self, client):
        response = client.post("/api/v1/scenarios/run", json=scenario_document(duration=-1))
        assert response.status_code == status.HTTP_422_UNPROCESSABLE_ENTITY
        assert response.json()["details"]
