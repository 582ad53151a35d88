import pytest
from fastapi.testclient import TestClient

from effikit.codebleu import codebleu
from effikit.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


def test_score_npi_endpoint(client):
    response = client.post(
        "/score/npi",
        json={"time_ms": 200, "profile": {"t_min_ms": 100, "t_med_ms": 200, "t_max_ms": 400}},
    )
    assert response.status_code == 200
    assert response.json() == {"npi": 50.0}


def test_score_npi_rejects_bad_profile(client):
    response = client.post(
        "/score/npi",
        json={"time_ms": 200, "profile": {"t_min_ms": 400, "t_med_ms": 200, "t_max_ms": 100}},
    )
    assert response.status_code == 400
    assert "ordering" in response.json()["detail"]


def test_score_codebleu_matches_library(client):
    candidate = "a = 1\nprint(a)\n"
    reference = "b = 2\nprint(b + 1)\n"
    response = client.post(
        "/score/codebleu", json={"candidate": candidate, "reference": reference}
    )
    assert response.status_code == 200
    want = codebleu(candidate, reference)
    got = response.json()
    assert got["combined"] == pytest.approx(want.combined, abs=1e-12)
    assert got["ngram"] == pytest.approx(want.ngram, abs=1e-12)


def test_score_ioccb_fallback_over_http(client):
    response = client.post(
        "/score/ioccb",
        json={"generated": "def f(:", "ground_truth": "a = 1\nprint(a)\n", "alternates": []},
    )
    assert response.status_code == 200
    payload = response.json()
    assert payload["normalization_applied"] is False
    assert payload["score"] == pytest.approx(max(payload["o_scores"]), abs=1e-12)


def test_normalize_endpoint(client):
    response = client.post("/normalize", json={"source": "alpha = 1\nprint(alpha)\n"})
    assert response.status_code == 200
    payload = response.json()
    assert payload["source"] == "var1 = 1\nprint(var1)\n"
    assert payload["rename_map"] == {"alpha": "var1"}


def test_normalize_rejects_broken_source(client):
    response = client.post("/normalize", json={"source": "def f(:"})
    assert response.status_code == 400


def test_validation_error_is_422(client):
    response = client.post("/score/npi", json={"time_ms": "soon"})
    assert response.status_code == 422


def test_eval_spearman_endpoint(client):
    response = client.post("/eval/spearman", json={"x": [1, 2, 3], "y": [3, 2, 1]})
    assert response.status_code == 200
    assert response.json()["rho"] == -1.0


def test_eval_spearman_rejects_constant(client):
    response = client.post("/eval/spearman", json={"x": [1, 1, 1], "y": [3, 2, 1]})
    assert response.status_code == 400


def test_eval_rmse_endpoint(client):
    records = [
        {"sample_id": "a", "predicted": 3.0, "actual": 0.0},
        {"sample_id": "b", "predicted": 4.0, "actual": 0.0},
    ]
    response = client.post("/eval/rmse", json={"records": records})
    assert response.status_code == 200
    assert response.json()["rmse"] == pytest.approx(3.5355339059327378, abs=1e-9)


def test_stats_breakpoints_endpoint(client):
    response = client.post("/stats/breakpoints", json={"times": [100, 350, 600]})
    assert response.status_code == 200
    payload = response.json()
    assert payload["breakpoints"] == [100, 200, 300, 400, 500, 600]
    assert payload["profile"] == {"t_min_ms": 100, "t_med_ms": 350, "t_max_ms": 600}
