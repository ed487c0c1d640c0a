"""HTTP surface: POST /score, POST /nli, GET /healthz.

The app answers 503 on every route until both models are loaded; loading
runs in a background thread kicked off at startup so slow checkpoints never
block the event loop. Inference itself is serialized behind one lock, with
oversized batches chunked, so the contract to clients stays ordering and
determinism only.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.responses import JSONResponse

from .backends import (
    DEFAULT_NLI_MODEL,
    DEFAULT_SCORER_MODEL,
    ModelLoadError,
    NliModel,
    RelevanceModel,
    load_nli_model,
    load_relevance_model,
)

log = logging.getLogger(__name__)

MAX_TEXT_CHARS = 4096
BATCH_SIZE = 64


class _ModelHolder:
    """Loading state shared between the startup thread and the handlers."""

    def __init__(self) -> None:
        self.relevance: RelevanceModel | None = None
        self.nli: NliModel | None = None
        self.error: str | None = None
        self.lock = threading.Lock()

    @property
    def ready(self) -> bool:
        return self.relevance is not None and self.nli is not None

    def load(self, scorer_name: str, nli_name: str) -> None:
        try:
            relevance = load_relevance_model(scorer_name)
            nli = load_nli_model(nli_name)
        except ModelLoadError as exc:
            log.error("model loading failed: %s", exc)
            self.error = str(exc)
            return
        self.relevance = relevance
        self.nli = nli
        log.info("models ready: scorer=%s nli=%s", relevance.name, nli.name)


def _bad_request(detail: str) -> JSONResponse:
    return JSONResponse({"error": detail}, status_code=400)


def _not_ready(holder: _ModelHolder) -> JSONResponse:
    if holder.error:
        return JSONResponse({"status": "failed", "detail": holder.error}, status_code=503)
    return JSONResponse({"status": "loading"}, status_code=503)


async def _json_object(request: Request) -> dict | JSONResponse:
    try:
        payload = json.loads(await request.body())
    except ValueError:
        return _bad_request("request body is not valid JSON")
    if not isinstance(payload, dict):
        return _bad_request("request body must be a JSON object")
    return payload


def _oversize(*texts: str) -> bool:
    return any(len(text) > MAX_TEXT_CHARS for text in texts)


def create_app(
    scorer_model: str | None = None,
    nli_model: str | None = None,
    *,
    relevance: RelevanceModel | None = None,
    nli: NliModel | None = None,
) -> FastAPI:
    """Build the service.

    Tests inject prewired models; production names checkpoints (or leaves
    them to the SCORER_MODEL / NLI_MODEL environment variables) and lets
    startup load them.
    """
    scorer_name = scorer_model or os.environ.get("SCORER_MODEL") or DEFAULT_SCORER_MODEL
    nli_name = nli_model or os.environ.get("NLI_MODEL") or DEFAULT_NLI_MODEL

    holder = _ModelHolder()
    if relevance is not None and nli is not None:
        holder.relevance = relevance
        holder.nli = nli

    @asynccontextmanager
    async def load_models_on_startup(_: FastAPI):
        if not holder.ready:
            threading.Thread(
                target=holder.load, args=(scorer_name, nli_name), name="model-loader", daemon=True
            ).start()
        yield

    app = FastAPI(title="scorer-service", version="0.1.0", lifespan=load_models_on_startup)

    @app.get("/healthz")
    async def healthz() -> JSONResponse:
        if not holder.ready:
            return _not_ready(holder)
        return JSONResponse(
            {"status": "ok", "scorer_model": holder.relevance.name, "nli_model": holder.nli.name}
        )

    def run_score(claim: str, candidates: list[str]) -> list[float]:
        scores: list[float] = []
        with holder.lock:
            for start in range(0, len(candidates), BATCH_SIZE):
                scores.extend(holder.relevance.score(claim, candidates[start : start + BATCH_SIZE]))
        return scores

    def run_nli(pairs: list[tuple[str, str]]) -> list[tuple[float, float, float]]:
        rows: list[tuple[float, float, float]] = []
        with holder.lock:
            for start in range(0, len(pairs), BATCH_SIZE):
                rows.extend(holder.nli.logits(pairs[start : start + BATCH_SIZE]))
        return rows

    @app.post("/score")
    async def score(request: Request) -> JSONResponse:
        if not holder.ready:
            return _not_ready(holder)
        payload = await _json_object(request)
        if isinstance(payload, JSONResponse):
            return payload

        claim = payload.get("claim")
        candidates = payload.get("candidates")
        if not isinstance(claim, str) or not claim:
            return _bad_request("claim must be a non-empty string")
        if not isinstance(candidates, list) or not candidates:
            return _bad_request("candidates must be a non-empty list")
        if not all(isinstance(c, str) for c in candidates):
            return _bad_request("every candidate must be a string")
        if _oversize(claim, *candidates):
            return JSONResponse(
                {"error": f"texts must be at most {MAX_TEXT_CHARS} characters"}, status_code=413
            )

        scores = await run_in_threadpool(run_score, claim, candidates)
        return JSONResponse({"scores": scores})

    @app.post("/nli")
    async def nli_endpoint(request: Request) -> JSONResponse:
        if not holder.ready:
            return _not_ready(holder)
        payload = await _json_object(request)
        if isinstance(payload, JSONResponse):
            return payload

        raw_pairs = payload.get("pairs")
        if not isinstance(raw_pairs, list) or not raw_pairs:
            return _bad_request("pairs must be a non-empty list")
        pairs: list[tuple[str, str]] = []
        for i, entry in enumerate(raw_pairs):
            if not isinstance(entry, dict):
                return _bad_request(f"pair {i} must be an object with premise and hypothesis")
            premise, hypothesis = entry.get("premise"), entry.get("hypothesis")
            if not isinstance(premise, str) or not isinstance(hypothesis, str):
                return _bad_request(f"pair {i} needs string premise and hypothesis")
            if _oversize(premise, hypothesis):
                return JSONResponse(
                    {"error": f"texts must be at most {MAX_TEXT_CHARS} characters"}, status_code=413
                )
            pairs.append((premise, hypothesis))

        rows = await run_in_threadpool(run_nli, pairs)
        return JSONResponse({"logits": [list(row) for row in rows]})

    return app
