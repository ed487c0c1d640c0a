"""Web-search fallback stage: query rewriting, snippet retrieval, classification.

Runs only when the KG stage could not decide. Never loops back: whatever
the web classifier says is final.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Protocol

from .backends.chat import ChatBackend
from .classify import NliBackend, _complete_with_retry, classify_llm, classify_nli
from .domain import Claim, EvidenceItem, EvidenceKind, Label, Verdict
from .errors import MalformedModelOutput
from .prompts import load_template, render
from .ranking import ScorerBackend, score_candidates, select_top_k

log = logging.getLogger(__name__)

MAX_QUERIES = 5
MAX_QUERY_WORDS = 12
DEFAULT_N_MAX = 100


@dataclass(frozen=True)
class SearchQuery:
    text: str

    def __post_init__(self) -> None:
        if not self.text or not self.text.strip():
            raise ValueError("search query must be non-empty")
        if len(self.text.split()) > MAX_QUERY_WORDS:
            raise ValueError(f"search query exceeds {MAX_QUERY_WORDS} words: {self.text!r}")


@dataclass(frozen=True)
class Snippet:
    """One search result: snippet text plus its page of origin."""

    text: str
    title: str
    url: str
    rank: int

    def __post_init__(self) -> None:
        if not self.text or not self.text.strip():
            raise ValueError("snippet text must be non-empty")
        if not self.url:
            raise ValueError("snippet must carry a source URL")
        if self.rank < 0:
            raise ValueError("snippet rank must be non-negative")


class SearchBackend(Protocol):
    def search(self, query: str, limit: int) -> list[Snippet]:
        """Up to limit snippets for one query, in engine rank order."""
        ...


def _parse_queries_json(raw: str) -> list[str]:
    text = raw.strip()
    try:
        payload = json.loads(text)
    except ValueError:
        start, end = text.find("{"), text.rfind("}")
        if start == -1 or end <= start:
            raise MalformedModelOutput(f"expected a JSON object, got: {text[:200]!r}") from None
        try:
            payload = json.loads(text[start : end + 1])
        except ValueError:
            raise MalformedModelOutput(f"could not parse JSON object from: {text[:200]!r}") from None
    if not isinstance(payload, dict) or "queries" not in payload:
        raise MalformedModelOutput("rewrite output must be an object with a 'queries' list")
    queries = payload["queries"]
    if not isinstance(queries, list) or not queries or not all(isinstance(q, str) and q.strip() for q in queries):
        raise MalformedModelOutput("'queries' must be a non-empty list of non-empty strings")
    return queries


def rewrite_queries(claim: Claim, chat: ChatBackend) -> list[SearchQuery]:
    """Turn the claim into at most five short search queries.

    Over-long queries are truncated by word rather than dropped; exact
    duplicates are removed; at most MAX_QUERIES survive, in model order.
    """
    template = load_template("rewrite")
    system_text, user_text = render(template, claim.text)
    raw_queries = _complete_with_retry(chat, system_text, user_text, _parse_queries_json)

    out: list[SearchQuery] = []
    seen: set[str] = set()
    for raw in raw_queries:
        words = raw.split()
        if len(words) > MAX_QUERY_WORDS:
            log.debug("truncating over-long query: %r", raw)
            words = words[:MAX_QUERY_WORDS]
        text = " ".join(words)
        if text in seen:
            continue
        seen.add(text)
        out.append(SearchQuery(text=text))
        if len(out) == MAX_QUERIES:
            break
    return out


def search_snippets(queries: list[SearchQuery], backend: SearchBackend, *, n_max: int = DEFAULT_N_MAX) -> list[Snippet]:
    """Merge per-query results round-robin, de-duplicating by URL, capped at n_max.

    Round-robin keeps every query's best hits near the front instead of
    letting the first query crowd out the rest.
    """
    if not queries:
        raise ValueError("query list must be non-empty")
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    per_query = [backend.search(q.text, n_max) for q in queries]

    merged: list[Snippet] = []
    seen_urls: set[str] = set()
    for position in range(max((len(r) for r in per_query), default=0)):
        for results in per_query:
            if position >= len(results):
                continue
            snippet = results[position]
            if snippet.url in seen_urls:
                continue
            seen_urls.add(snippet.url)
            merged.append(snippet)
            if len(merged) == n_max:
                return merged
    return merged


@dataclass(frozen=True)
class WebStageOutcome:
    """What the fallback produced: the verdict plus the evidence behind it."""

    verdict: Verdict
    evidence: tuple[EvidenceItem, ...]
    queries: tuple[SearchQuery, ...]
    snippets_retrieved: int


def run_fallback(
    claim: Claim,
    *,
    chat: ChatBackend,
    search: SearchBackend,
    scorer: ScorerBackend,
    nli: NliBackend | None = None,
    classifier: str = "llm",
    k: int = 5,
    n_max: int = DEFAULT_N_MAX,
) -> WebStageOutcome:
    """Rewrite, search, rank, classify. One pass, no second fallback.

    An empty result set (all queries came back dry) yields NEI without
    calling the classifier.
    """
    queries = rewrite_queries(claim, chat)
    snippets = search_snippets(queries, search, n_max=n_max)
    if not snippets:
        verdict = Verdict(label=Label.NEI, reason="Web search returned no snippets.", cited_evidence=())
        return WebStageOutcome(verdict=verdict, evidence=(), queries=tuple(queries), snippets_retrieved=0)

    candidates = [
        EvidenceItem(text=s.text, kind=EvidenceKind.WEB_SNIPPET, source=s.url) for s in snippets
    ]
    top = select_top_k(score_candidates(claim.text, candidates, scorer), k)
    if classifier == "nli":
        if nli is None:
            raise ValueError("NLI classifier selected but no NLI backend provided")
        verdict = classify_nli(claim, top, nli)
    else:
        verdict = classify_llm(claim, top, "web", chat)
    return WebStageOutcome(
        verdict=verdict, evidence=tuple(top), queries=tuple(queries), snippets_retrieved=len(snippets)
    )
