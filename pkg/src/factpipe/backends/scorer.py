"""Relevance scorer backends that are not the in-process lexical fallback."""

from __future__ import annotations

from pathlib import Path

import httpx

from ..errors import ScorerUnavailable
from ..fixtures import fixture_key, read_fixture, write_fixture


class RemoteRelevanceScorer:
    """Client for a cross-encoder scoring service.

    POSTs {"claim": ..., "candidates": [...]} and expects {"scores": [...]}
    aligned with the candidate order.
    """

    def __init__(self, url: str, *, timeout: float = 30.0, client: httpx.Client | None = None):
        self._url = url
        self._client = client or httpx.Client(timeout=timeout)

    def score(self, claim_text: str, candidate_texts: list[str]) -> list[float]:
        try:
            response = self._client.post(self._url, json={"claim": claim_text, "candidates": candidate_texts})
            response.raise_for_status()
            payload = response.json()
        except httpx.HTTPError as exc:
            raise ScorerUnavailable(f"scorer request failed: {exc}") from exc
        except ValueError as exc:
            raise ScorerUnavailable(f"scorer response was not JSON: {exc}") from exc
        scores = payload.get("scores")
        if not isinstance(scores, list) or len(scores) != len(candidate_texts):
            raise ScorerUnavailable("scorer broke the response contract: scores misaligned with candidates")
        return [float(s) for s in scores]


class FixtureRelevanceScorer:
    """Replays recorded score vectors keyed by claim and candidate texts."""

    KIND = "score"

    def __init__(self, root: Path | str):
        self._root = Path(root)

    def score(self, claim_text: str, candidate_texts: list[str]) -> list[float]:
        key = fixture_key(self.KIND, claim_text, *candidate_texts)
        response = read_fixture(self._root, self.KIND, key)
        if response is None:
            raise ScorerUnavailable(f"no recorded scores for key {key}")
        scores = response["scores"]
        if len(scores) != len(candidate_texts):
            raise ScorerUnavailable("recorded scores misaligned with candidates")
        return [float(s) for s in scores]

    def record(self, claim_text: str, candidate_texts: list[str], scores: list[float]) -> Path:
        key = fixture_key(self.KIND, claim_text, *candidate_texts)
        request = {"claim": claim_text, "candidates": list(candidate_texts)}
        return write_fixture(self._root, self.KIND, key, request, {"scores": list(scores)})
