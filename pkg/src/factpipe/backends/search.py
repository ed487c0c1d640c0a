"""Web search backends: Programmable Search API client and fixture replay."""

from __future__ import annotations

import logging
from pathlib import Path

import httpx

from ..errors import QuotaExceeded, SearchBackendUnavailable
from ..fixtures import fixture_key, read_fixture, write_fixture
from ..web_fallback import Snippet

log = logging.getLogger(__name__)

_API_URL = "https://www.googleapis.com/customsearch/v1"
_PAGE_SIZE = 10  # API maximum per request


class ProgrammableSearchClient:
    """Google Programmable Search; key and engine id come from the environment."""

    def __init__(
        self,
        api_key: str,
        engine_id: str,
        *,
        timeout: float = 15.0,
        client: httpx.Client | None = None,
    ):
        if not api_key or not engine_id:
            raise ValueError("search backend requires an API key and engine id")
        self._api_key = api_key
        self._engine_id = engine_id
        self._client = client or httpx.Client(timeout=timeout)

    def search(self, query: str, limit: int) -> list[Snippet]:
        snippets: list[Snippet] = []
        start = 1
        while len(snippets) < limit:
            params = {
                "key": self._api_key,
                "cx": self._engine_id,
                "q": query,
                "num": min(_PAGE_SIZE, limit - len(snippets)),
                "start": start,
            }
            try:
                response = self._client.get(_API_URL, params=params)
                if response.status_code == 429:
                    raise QuotaExceeded(f"search quota exhausted for query {query!r}")
                response.raise_for_status()
                payload = response.json()
            except QuotaExceeded:
                raise
            except httpx.HTTPStatusError as exc:
                if exc.response.status_code == 403:
                    # Programmable Search reports exhausted daily quota as 403.
                    raise QuotaExceeded(f"search quota rejected query {query!r}: {exc}") from exc
                raise SearchBackendUnavailable(f"search request failed: {exc}") from exc
            except httpx.HTTPError as exc:
                raise SearchBackendUnavailable(f"search request failed: {exc}") from exc
            except ValueError as exc:
                raise SearchBackendUnavailable(f"search response was not JSON: {exc}") from exc

            items = payload.get("items", [])
            if not items:
                break
            for item in items:
                text = item.get("snippet") or ""
                url = item.get("link") or ""
                if not text.strip() or not url:
                    continue
                snippets.append(Snippet(text=text, title=item.get("title", ""), url=url, rank=len(snippets)))
                if len(snippets) == limit:
                    break
            start += _PAGE_SIZE
            if start > 91:
                # API refuses start beyond 100 results.
                break
        return snippets


class FixtureSearchBackend:
    """Replays recorded result lists keyed by the exact query text."""

    KIND = "search"

    def __init__(self, root: Path | str):
        self._root = Path(root)

    def search(self, query: str, limit: int) -> list[Snippet]:
        key = fixture_key(self.KIND, query)
        response = read_fixture(self._root, self.KIND, key)
        if response is None:
            raise SearchBackendUnavailable(f"no recorded search results for key {key}")
        snippets = [
            Snippet(text=s["text"], title=s.get("title", ""), url=s["url"], rank=s.get("rank", i))
            for i, s in enumerate(response["snippets"])
        ]
        return snippets[:limit]

    def record(self, query: str, snippets: list[Snippet]) -> Path:
        key = fixture_key(self.KIND, query)
        payload = {
            "snippets": [
                {"text": s.text, "title": s.title, "url": s.url, "rank": s.rank} for s in snippets
            ]
        }
        return write_fixture(self._root, self.KIND, key, {"query": query}, payload)
