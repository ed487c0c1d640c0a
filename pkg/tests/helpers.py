"""Scripted in-memory backends for exercising pipeline logic without I/O."""

from __future__ import annotations

from typing import Callable, Iterable

from factpipe.classify import NliLogits
from factpipe.domain import Direction, RdfTerm, Triple
from factpipe.entity_linking import LinkedEntity
from factpipe.errors import (
    ChatBackendUnavailable,
    EndpointError,
    LinkerUnavailable,
    SearchBackendUnavailable,
)
from factpipe.web_fallback import Snippet


class ScriptedChat:
    """Chat backend driven by a callable; records every prompt pair it saw."""

    def __init__(self, responder: Callable[[str, str], str]):
        self.responder = responder
        self.calls: list[tuple[str, str]] = []

    def complete(self, system_text: str, user_text: str) -> str:
        self.calls.append((system_text, user_text))
        return self.responder(system_text, user_text)


def static_chat(text: str) -> ScriptedChat:
    return ScriptedChat(lambda system, user: text)


def failing_chat() -> ScriptedChat:
    def refuse(system: str, user: str) -> str:
        raise ChatBackendUnavailable("scripted chat outage")

    return ScriptedChat(refuse)


class TableLinker:
    """Linker with canned mentions per exact claim text; optionally down."""

    def __init__(self, table: dict[str, list[LinkedEntity]] | None = None, *, down: bool = False):
        self.table = table or {}
        self.down = down
        self.calls = 0

    def link(self, text: str) -> list[LinkedEntity]:
        self.calls += 1
        if self.down:
            raise LinkerUnavailable("scripted linker outage")
        return list(self.table.get(text, []))


def entity(surface: str, start: int, qid: str, iri: str | None = None) -> LinkedEntity:
    return LinkedEntity(surface=surface, start=start, end=start + len(surface), qid=qid, dbpedia_iri=iri)


class GraphTripleSource:
    """TripleSource over an in-memory set of (subject, predicate, object) rows."""

    def __init__(self, rows: Iterable[tuple[str, str, RdfTerm | str]] = (), *, down: bool = False):
        self.rows: list[tuple[str, str, RdfTerm]] = [
            (s, p, o if isinstance(o, RdfTerm) else RdfTerm(value=o)) for s, p, o in rows
        ]
        self.down = down

    def one_hop(self, entity_iri: str) -> list[Triple]:
        if self.down:
            raise EndpointError("scripted endpoint outage")
        out = [
            Triple(subject=s, predicate=p, object=o, direction=Direction.ENTITY_AS_SUBJECT)
            for s, p, o in self.rows
            if s == entity_iri
        ]
        out += [
            Triple(subject=s, predicate=p, object=o, direction=Direction.ENTITY_AS_OBJECT)
            for s, p, o in self.rows
            if not o.is_literal and o.value == entity_iri
        ]
        return out


class TableSearch:
    """Search backend with canned snippets per query text."""

    def __init__(self, table: dict[str, list[Snippet]] | None = None, *, down: bool = False):
        self.table = table or {}
        self.down = down
        self.queries: list[str] = []

    def search(self, query: str, limit: int) -> list[Snippet]:
        self.queries.append(query)
        if self.down:
            raise SearchBackendUnavailable("scripted search outage")
        return list(self.table.get(query, []))[:limit]


def snippet(text: str, url: str, rank: int = 0, title: str = "") -> Snippet:
    return Snippet(text=text, title=title, url=url, rank=rank)


class TableNli:
    """NLI backend with canned logits keyed by (premise, hypothesis)."""

    def __init__(self, table: dict[tuple[str, str], NliLogits] | None = None, default: NliLogits | None = None):
        self.table = table or {}
        self.default = default if default is not None else NliLogits(0.0, 5.0, 0.0)

    def judge(self, pairs: list[tuple[str, str]]) -> list[NliLogits]:
        return [self.table.get(pair, self.default) for pair in pairs]


class TableScorer:
    """Scorer with canned scores per candidate text; unknown texts get default."""

    def __init__(self, scores: dict[str, float] | None = None, default: float = 0.0):
        self.scores = scores or {}
        self.default = default

    def score(self, claim_text: str, candidate_texts: list[str]) -> list[float]:
        return [self.scores.get(text, self.default) for text in candidate_texts]
