"""NLI backends: remote inference service client and fixture replay.

The wire contract fixes the logit order to (entailment, neutral,
contradiction); permuting checkpoint-specific label orders is the serving
side's job.
"""

from __future__ import annotations

from pathlib import Path

import httpx

from ..classify import NliLogits
from ..errors import NliBackendUnavailable
from ..fixtures import fixture_key, read_fixture, write_fixture


class RemoteNliBackend:
    """POSTs {"pairs": [{"premise", "hypothesis"}]} and expects {"logits": [[e, n, c]]}."""

    def __init__(self, url: str, *, timeout: float = 30.0, client: httpx.Client | None = None):
        self._url = url
        self._client = client or httpx.Client(timeout=timeout)

    def judge(self, pairs: list[tuple[str, str]]) -> list[NliLogits]:
        body = {"pairs": [{"premise": p, "hypothesis": h} for p, h in pairs]}
        try:
            response = self._client.post(self._url, json=body)
            response.raise_for_status()
            payload = response.json()
        except httpx.HTTPError as exc:
            raise NliBackendUnavailable(f"NLI request failed: {exc}") from exc
        except ValueError as exc:
            raise NliBackendUnavailable(f"NLI response was not JSON: {exc}") from exc
        logits = payload.get("logits")
        if not isinstance(logits, list) or len(logits) != len(pairs):
            raise NliBackendUnavailable("NLI backend broke the response contract: logits misaligned with pairs")
        try:
            return [NliLogits(float(row[0]), float(row[1]), float(row[2])) for row in logits]
        except (IndexError, TypeError, ValueError) as exc:
            raise NliBackendUnavailable(f"NLI logits rows malformed: {exc}") from exc


class FixtureNliBackend:
    """Replays recorded logits, one fixture per (premise, hypothesis) pair."""

    KIND = "nli"

    def __init__(self, root: Path | str):
        self._root = Path(root)

    def judge(self, pairs: list[tuple[str, str]]) -> list[NliLogits]:
        out: list[NliLogits] = []
        for premise, hypothesis in pairs:
            key = fixture_key(self.KIND, premise, hypothesis)
            response = read_fixture(self._root, self.KIND, key)
            if response is None:
                raise NliBackendUnavailable(f"no recorded NLI logits for key {key}")
            row = response["logits"]
            out.append(NliLogits(float(row[0]), float(row[1]), float(row[2])))
        return out

    def record(self, premise: str, hypothesis: str, logits: NliLogits) -> Path:
        key = fixture_key(self.KIND, premise, hypothesis)
        request = {"premise": premise, "hypothesis": hypothesis}
        return write_fixture(self._root, self.KIND, key, request, {"logits": list(logits.as_tuple())})
