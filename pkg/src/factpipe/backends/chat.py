"""Chat completion backends.

The pipeline only ever needs one operation: send a (system, user) prompt
pair at temperature 0 and get the assistant text back. Parsing of that text
is the caller's job.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Protocol

import httpx

from ..errors import ChatBackendUnavailable
from ..fixtures import fixture_key, read_fixture, write_fixture

log = logging.getLogger(__name__)


class ChatBackend(Protocol):
    def complete(self, system_text: str, user_text: str) -> str:
        """Return the assistant message text for one prompt pair."""
        ...


class HttpChatBackend:
    """OpenAI-style chat completions client.

    The API key comes from the environment via config wiring, never from a
    file on disk.
    """

    def __init__(
        self,
        api_url: str,
        api_key: str,
        model: str,
        *,
        timeout: float = 30.0,
        client: httpx.Client | None = None,
    ):
        if not api_key:
            raise ValueError("chat backend requires an API key")
        self._api_url = api_url.rstrip("/")
        self._model = model
        self._client = client or httpx.Client(timeout=timeout)
        self._headers = {"Authorization": f"Bearer {api_key}"}

    def complete(self, system_text: str, user_text: str) -> str:
        body = {
            "model": self._model,
            "temperature": 0.0,
            "messages": [
                {"role": "system", "content": system_text},
                {"role": "user", "content": user_text},
            ],
        }
        try:
            response = self._client.post(f"{self._api_url}/chat/completions", json=body, headers=self._headers)
            response.raise_for_status()
            payload = response.json()
            return payload["choices"][0]["message"]["content"]
        except httpx.HTTPError as exc:
            raise ChatBackendUnavailable(f"chat completion request failed: {exc}") from exc
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ChatBackendUnavailable(f"chat completion response had unexpected shape: {exc}") from exc


class FixtureChatBackend:
    """Replays recorded completions keyed by the exact prompt pair."""

    KIND = "chat"

    def __init__(self, root: Path | str):
        self._root = Path(root)

    def complete(self, system_text: str, user_text: str) -> str:
        key = fixture_key(self.KIND, system_text, user_text)
        response = read_fixture(self._root, self.KIND, key)
        if response is None:
            raise ChatBackendUnavailable(f"no recorded chat completion for key {key}")
        return response["content"]

    def record(self, system_text: str, user_text: str, content: str) -> Path:
        key = fixture_key(self.KIND, system_text, user_text)
        request = {"system": system_text, "user": user_text}
        return write_fixture(self._root, self.KIND, key, request, {"content": content})


class RecordingChatBackend(FixtureChatBackend):
    """Fixture backend that fills cache misses from a responder callable.

    Fixture-authoring tool only; production wiring never uses it.
    """

    def __init__(self, root: Path | str, responder):
        super().__init__(root)
        self._responder = responder

    def complete(self, system_text: str, user_text: str) -> str:
        try:
            return super().complete(system_text, user_text)
        except ChatBackendUnavailable:
            content = self._responder(system_text, user_text)
            self.record(system_text, user_text, content)
            log.info("recorded chat fixture (%d chars)", len(content))
            return content
