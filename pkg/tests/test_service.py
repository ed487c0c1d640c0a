from __future__ import annotations

import threading

import pytest
from fastapi.testclient import TestClient

from factpipe.errors import BudgetExceeded, PipelineError
from factpipe.service import create_app
from test_orchestrator import CLAIM, KG_NEI, KG_SUPPORTED, WEB_REFUTED, WEB_TABLE, make_pipeline, staged_chat
from helpers import TableSearch, failing_chat


@pytest.fixture
def client():
    pipeline = make_pipeline(chat=staged_chat(kg_answer=KG_SUPPORTED))
    return TestClient(create_app(pipeline=pipeline))


class TestVerifyEndpoint:
    def test_success_shape(self, client):
        response = client.post("/verify", json={"claim": CLAIM.text, "id": "c1"})
        assert response.status_code == 200
        body = response.json()
        assert body["claim_id"] == "c1"
        assert body["final_label"] == "Supported"
        assert body["stage"] == "kg"
        assert body["fallback_used"] is False
        assert body["evidence"][0]["text"] == "Arya_Stark -> creator -> George_R._R._Martin"
        assert body["verdict"]["cited_evidence"] == [0]
        assert "latency_ms" in body

    def test_default_claim_id(self, client):
        body = client.post("/verify", json={"claim": CLAIM.text}).json()
        assert body["claim_id"] == "request"

    def test_fallback_surface(self):
        pipeline = make_pipeline(
            chat=staged_chat(kg_answer=KG_NEI, web_answer=WEB_REFUTED), search=TableSearch(WEB_TABLE)
        )
        client = TestClient(create_app(pipeline=pipeline))
        body = client.post("/verify", json={"claim": CLAIM.text}).json()
        assert body["final_label"] == "Refuted"
        assert body["stage"] == "web"
        assert body["fallback_used"] is True

    def test_malformed_json_is_400(self, client):
        response = client.post("/verify", content=b"{claim: no quotes", headers={"content-type": "application/json"})
        assert response.status_code == 400
        assert "not valid JSON" in response.json()["error"]

    def test_non_object_body_is_400(self, client):
        response = client.post("/verify", json=["a", "list"])
        assert response.status_code == 400

    @pytest.mark.parametrize("payload", [{}, {"claim": ""}, {"claim": "   "}, {"claim": 42}])
    def test_bad_claim_is_422(self, client, payload):
        response = client.post("/verify", json=payload)
        assert response.status_code == 422
        assert "claim" in response.json()["error"]

    def test_non_dict_options_is_422(self, client):
        response = client.post("/verify", json={"claim": "x", "options": [1]})
        assert response.status_code == 422

    def test_unknown_option_is_422(self, client):
        response = client.post("/verify", json={"claim": CLAIM.text, "options": {"budget_seconds": 1}})
        assert response.status_code == 422
        assert "not overridable" in response.json()["error"]

    def test_option_override_applies(self):
        pipeline = make_pipeline(chat=staged_chat(kg_answer=KG_NEI))
        client = TestClient(create_app(pipeline=pipeline))
        body = client.post(
            "/verify", json={"claim": CLAIM.text, "options": {"mode": "kg_only"}}
        ).json()
        assert body["final_label"] == "Not Enough Info"
        assert body["stage"] == "kg"

    def test_pipeline_error_is_502(self):
        pipeline = make_pipeline(chat=failing_chat(), search=TableSearch(WEB_TABLE))
        client = TestClient(create_app(pipeline=pipeline))
        response = client.post("/verify", json={"claim": CLAIM.text})
        assert response.status_code == 502
        body = response.json()
        assert body["error"] == "verification failed"
        assert any("kg stage failed" in d for d in body["diagnostics"])

    def test_budget_exceeded_is_504(self):
        class SlowPipeline:
            config = None

            def verify(self, claim, overrides=None):
                raise BudgetExceeded("too slow", ["kg stage ran long"])

        client = TestClient(create_app(pipeline=SlowPipeline()))
        response = client.post("/verify", json={"claim": "x"})
        assert response.status_code == 504
        body = response.json()
        assert body["error"] == "verification budget exceeded"
        assert body["diagnostics"] == ["kg stage ran long"]

    def test_unexpected_error_is_500_json(self):
        class BrokenPipeline:
            def verify(self, claim, overrides=None):
                raise RuntimeError("wires crossed")

        client = TestClient(create_app(pipeline=BrokenPipeline()))
        response = client.post("/verify", json={"claim": "x"})
        assert response.status_code == 500
        assert response.json() == {"error": "internal error"}

    def test_budget_maps_to_504_not_502(self):
        # BudgetExceeded subclasses PipelineError; the more specific handler
        # must win.
        assert issubclass(BudgetExceeded, PipelineError)

        class SlowPipeline:
            def verify(self, claim, overrides=None):
                raise BudgetExceeded("too slow", [])

        response = TestClient(create_app(pipeline=SlowPipeline())).post("/verify", json={"claim": "x"})
        assert response.status_code == 504


class TestHealthz:
    def test_ok(self, client):
        response = client.get("/healthz")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}


class TestConcurrencyGate:
    def test_in_flight_cap_enforced(self):
        release = threading.Event()
        peak = [0]
        active = [0]
        lock = threading.Lock()

        class BlockingPipeline:
            def verify(self, claim, overrides=None):
                with lock:
                    active[0] += 1
                    peak[0] = max(peak[0], active[0])
                release.wait(timeout=5)
                with lock:
                    active[0] -= 1
                raise PipelineError("never mind", [])

        app = create_app(pipeline=BlockingPipeline(), max_in_flight=2)

        def call():
            with TestClient(app) as c:
                c.post("/verify", json={"claim": "x"})

        threads = [threading.Thread(target=call) for _ in range(5)]
        for t in threads:
            t.start()
        # Give the workers time to pile up against the gate.
        import time

        time.sleep(0.3)
        observed_peak = peak[0]
        release.set()
        for t in threads:
            t.join(timeout=10)
        assert observed_peak <= 2
