"""REST front end for the pipeline.

POST /verify takes {"claim": ..., "options": {...}} and returns the full
verification result; GET /healthz answers liveness probes. Every response,
including errors, is JSON.
"""

from __future__ import annotations

import json
import logging
import threading
from typing import Any

from fastapi import FastAPI, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.responses import JSONResponse

from .errors import BudgetExceeded, PipelineError
from .orchestrator import Pipeline, PipelineConfig, build_pipeline

log = logging.getLogger(__name__)

DEFAULT_MAX_IN_FLIGHT = 8


def create_app(
    config: PipelineConfig | None = None,
    *,
    pipeline: Pipeline | None = None,
    max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
) -> FastAPI:
    """Build the service around one shared pipeline.

    Tests inject a prewired pipeline; production passes a config and lets
    the factory wire backends once at startup.
    """
    if pipeline is None:
        pipeline = build_pipeline(config or PipelineConfig())
    app = FastAPI(title="factpipe", version="0.1.0")
    gate = threading.BoundedSemaphore(max_in_flight)

    def guarded_verify(claim_text: str, claim_id: str, options: dict[str, Any]):
        from .domain import Claim

        with gate:
            return pipeline.verify(Claim(id=claim_id, text=claim_text), overrides=options or None)

    @app.get("/healthz")
    async def healthz() -> JSONResponse:
        return JSONResponse({"status": "ok"})

    @app.post("/verify")
    async def verify(request: Request) -> JSONResponse:
        # Body parsing is manual so malformed JSON gets a 400 while a
        # well-formed body with a bad claim gets a 422.
        raw = await request.body()
        try:
            payload = json.loads(raw)
        except ValueError:
            return JSONResponse({"error": "request body is not valid JSON"}, status_code=400)
        if not isinstance(payload, dict):
            return JSONResponse({"error": "request body must be a JSON object"}, status_code=400)

        claim_text = payload.get("claim")
        if not isinstance(claim_text, str) or not claim_text.strip():
            return JSONResponse({"error": "claim must be a non-empty string"}, status_code=422)
        options = payload.get("options", {})
        if not isinstance(options, dict):
            return JSONResponse({"error": "options must be a JSON object"}, status_code=422)
        claim_id = str(payload.get("id", "request"))

        try:
            result = await run_in_threadpool(guarded_verify, claim_text, claim_id, options)
        except ValueError as exc:
            return JSONResponse({"error": str(exc)}, status_code=422)
        except BudgetExceeded as exc:
            return JSONResponse(
                {"error": "verification budget exceeded", "detail": str(exc), "diagnostics": exc.diagnostics},
                status_code=504,
            )
        except PipelineError as exc:
            return JSONResponse(
                {"error": "verification failed", "detail": str(exc), "diagnostics": exc.diagnostics},
                status_code=502,
            )
        except Exception:  # noqa: BLE001 - last-resort guard, responses stay JSON
            log.exception("unexpected error while verifying")
            return JSONResponse({"error": "internal error"}, status_code=500)
        return JSONResponse(result.to_json_dict())

    return app
