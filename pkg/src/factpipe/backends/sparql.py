"""SPARQL transports: live HTTP and recorded replay.

A transport takes a query string and returns SPARQL JSON results. Query
construction and row parsing live with the retrieval code; transports only
move bytes, which is what makes bit-exact replay possible.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Protocol

import httpx

from ..errors import EndpointError, MalformedResponse
from ..fixtures import fixture_key, read_fixture, write_fixture

log = logging.getLogger(__name__)


class SparqlTransport(Protocol):
    def execute(self, query: str) -> dict:
        """Run a SELECT query, returning decoded SPARQL JSON results."""
        ...


class HttpSparqlTransport:
    def __init__(
        self,
        endpoint_url: str,
        *,
        timeout: float = 15.0,
        retries: int = 1,
        client: httpx.Client | None = None,
    ):
        self._endpoint_url = endpoint_url
        self._retries = max(0, retries)
        self._client = client or httpx.Client(timeout=timeout)

    def execute(self, query: str) -> dict:
        params = {"query": query, "format": "application/sparql-results+json"}
        headers = {"Accept": "application/sparql-results+json"}
        last: Exception | None = None
        for attempt in range(self._retries + 1):
            try:
                response = self._client.get(self._endpoint_url, params=params, headers=headers)
                response.raise_for_status()
            except httpx.HTTPError as exc:
                last = exc
                log.warning("SPARQL request failed (attempt %d): %s", attempt + 1, exc)
                continue
            try:
                return response.json()
            except ValueError as exc:
                raise MalformedResponse(f"SPARQL endpoint returned non-JSON body: {exc}") from exc
        raise EndpointError(f"SPARQL endpoint unreachable after {self._retries + 1} attempt(s): {last}") from last


class RecordedSparqlTransport:
    """Replays recorded result sets keyed by the exact query text."""

    KIND = "sparql"

    def __init__(self, root: Path | str):
        self._root = Path(root)

    def execute(self, query: str) -> dict:
        key = fixture_key(self.KIND, query)
        response = read_fixture(self._root, self.KIND, key)
        if response is None:
            raise EndpointError(f"no recorded SPARQL response for key {key}")
        return response

    def record(self, query: str, results: dict) -> Path:
        key = fixture_key(self.KIND, query)
        return write_fixture(self._root, self.KIND, key, {"query": query}, results)
