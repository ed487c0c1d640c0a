"""Entity linking: claim text to Wikidata Q-ids to DBpedia resource IRIs.

Linking runs a primary backend and consults the fallback only when the
primary yields nothing. Q-ids are bridged to DBpedia through owl:sameAs
lookups unless the linker already supplied an IRI.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Protocol

import httpx

from .backends.sparql import SparqlTransport
from .domain import Claim
from .errors import EndpointError, LinkerUnavailable, MalformedResponse

log = logging.getLogger(__name__)

_QID_RE = re.compile(r"^Q\d+$")

PRIMARY = "primary"
FALLBACK = "fallback"


@dataclass(frozen=True)
class LinkedEntity:
    """One mention in the claim, resolved to a Wikidata id.

    surface is the exact substring claim_text[start:end]; dbpedia_iri stays
    None until the sameAs bridge fills it (or fails to).
    """

    surface: str
    start: int
    end: int
    qid: str
    dbpedia_iri: str | None = None
    linker: str = PRIMARY

    def __post_init__(self) -> None:
        if not _QID_RE.match(self.qid):
            raise ValueError(f"not a Wikidata Q-id: {self.qid!r}")
        if self.start < 0 or self.end <= self.start:
            raise ValueError(f"bad mention offsets: [{self.start}, {self.end})")
        if self.linker not in (PRIMARY, FALLBACK):
            raise ValueError(f"unknown linker role: {self.linker!r}")


class Linker(Protocol):
    def link(self, text: str) -> list[LinkedEntity]:
        """Return mentions found in text; raise LinkerUnavailable on transport failure."""
        ...


class HttpLinker:
    """Client for a linking service that takes {"text": ...} and returns mentions."""

    def __init__(self, url: str, *, timeout: float = 15.0, client: httpx.Client | None = None):
        self._url = url
        self._client = client or httpx.Client(timeout=timeout)

    def link(self, text: str) -> list[LinkedEntity]:
        try:
            response = self._client.post(self._url, json={"text": text})
            response.raise_for_status()
            payload = response.json()
        except httpx.HTTPError as exc:
            raise LinkerUnavailable(f"linker at {self._url} failed: {exc}") from exc
        except ValueError as exc:
            raise LinkerUnavailable(f"linker at {self._url} returned non-JSON: {exc}") from exc
        mentions = []
        for raw in payload.get("mentions", []):
            qid = raw.get("qid")
            if not qid:
                # Mention the service could not ground; useless downstream.
                continue
            mentions.append(
                LinkedEntity(
                    surface=raw["surface"],
                    start=int(raw["start"]),
                    end=int(raw["end"]),
                    qid=qid,
                    dbpedia_iri=raw.get("dbpedia_iri"),
                )
            )
        return mentions


class DictionaryLinker:
    """Deterministic gazetteer over a TSV of surface, qid, dbpedia_iri rows.

    Matching is case-insensitive on word boundaries, longest surface first,
    non-overlapping. Meant for fixture mode and tests, where linking must be
    reproducible byte-for-byte.
    """

    def __init__(self, path: Path | str):
        self._entries: dict[str, tuple[str, str | None]] = {}
        for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise ValueError(f"linker dictionary line {line_no}: expected surface<TAB>qid[<TAB>iri]")
            surface, qid = parts[0], parts[1]
            iri = parts[2] if len(parts) > 2 and parts[2] else None
            self._entries[surface] = (qid, iri)
        # Longest surfaces first so "George R. R. Martin" beats "George".
        self._ordered = sorted(self._entries, key=lambda s: (-len(s), s))

    def link(self, text: str) -> list[LinkedEntity]:
        found: list[LinkedEntity] = []
        taken: list[tuple[int, int]] = []
        for surface in self._ordered:
            qid, iri = self._entries[surface]
            pattern = re.compile(rf"(?<!\w){re.escape(surface)}(?!\w)", re.IGNORECASE)
            for match in pattern.finditer(text):
                span = (match.start(), match.end())
                if any(span[0] < e and s < span[1] for s, e in taken):
                    continue
                taken.append(span)
                found.append(
                    LinkedEntity(surface=match.group(0), start=span[0], end=span[1], qid=qid, dbpedia_iri=iri)
                )
        found.sort(key=lambda m: m.start)
        return found


def link_entities(claim: Claim, primary: Linker, fallback: Linker | None = None) -> list[LinkedEntity]:
    """Link the claim with the primary backend, falling back only on empty output.

    An unreachable backend counts as producing nothing; LinkerUnavailable is
    raised only when every configured backend was unreachable. Q-id
    duplicates keep their first mention.
    """
    failures = 0
    backends = [(PRIMARY, primary)] + ([(FALLBACK, fallback)] if fallback is not None else [])
    mentions: list[LinkedEntity] = []
    role_used = PRIMARY
    for role, backend in backends:
        try:
            mentions = backend.link(claim.text)
        except LinkerUnavailable as exc:
            failures += 1
            log.warning("%s linker unavailable: %s", role, exc)
            mentions = []
        if mentions:
            role_used = role
            break
    if failures == len(backends):
        raise LinkerUnavailable("all entity linking backends were unreachable")

    out: list[LinkedEntity] = []
    seen_qids: set[str] = set()
    for mention in mentions:
        if claim.text[mention.start:mention.end] != mention.surface:
            raise ValueError(
                f"mention offsets [{mention.start}, {mention.end}) do not match surface {mention.surface!r}"
            )
        if mention.qid in seen_qids:
            continue
        seen_qids.add(mention.qid)
        out.append(replace(mention, linker=role_used))
    return out


# DBpedia stores the owl:sameAs arc pointing at Wikidata, so match on that
# direction and keep only resources in the canonical namespace.
_SAMEAS_QUERY = """\
SELECT DISTINCT ?resource WHERE {{
  ?resource <http://www.w3.org/2002/07/owl#sameAs> <http://www.wikidata.org/entity/{qid}> .
  FILTER(STRSTARTS(STR(?resource), "http://dbpedia.org/resource/"))
}}
LIMIT 1
"""


def sameas_query(qid: str) -> str:
    if not _QID_RE.match(qid):
        raise ValueError(f"not a Wikidata Q-id: {qid!r}")
    return _SAMEAS_QUERY.format(qid=qid)


def map_to_dbpedia(qid: str, transport: SparqlTransport) -> str | None:
    """Resolve a Q-id to its DBpedia resource IRI, or None when no sameAs arc exists."""
    results = transport.execute(sameas_query(qid))
    try:
        bindings = results["results"]["bindings"]
    except (KeyError, TypeError) as exc:
        raise MalformedResponse(f"sameAs lookup returned unexpected shape: {exc}") from exc
    if not bindings:
        return None
    return bindings[0]["resource"]["value"]


def resolve_entities(
    claim: Claim,
    primary: Linker,
    fallback: Linker | None,
    transport: SparqlTransport | None,
) -> list[LinkedEntity]:
    """link_entities plus the sameAs bridge for mentions lacking a DBpedia IRI.

    A failed sameAs lookup leaves dbpedia_iri as None rather than aborting;
    retrieval simply skips such entities.
    """
    entities = link_entities(claim, primary, fallback)
    resolved: list[LinkedEntity] = []
    for entity in entities:
        if entity.dbpedia_iri is None and transport is not None:
            try:
                entity = replace(entity, dbpedia_iri=map_to_dbpedia(entity.qid, transport))
            except (EndpointError, MalformedResponse) as exc:
                log.warning("sameAs lookup failed for %s: %s", entity.qid, exc)
        resolved.append(entity)
    return resolved
