"""One-hop triple retrieval around linked entities, plus meta-predicate filtering.

Retrieval collects triples in both directions (entity as subject and as
object), de-duplicates them, and enforces a hard cap so a hub entity cannot
flood the ranker.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Protocol

from .backends.sparql import SparqlTransport
from .domain import Direction, RdfTerm, Triple
from .errors import MalformedResponse

log = logging.getLogger(__name__)

TRIPLE_CAP = 2000


@dataclass(frozen=True)
class PredicateBlacklist:
    """Predicate IRIs to drop, as exact entries plus prefix entries."""

    exact: frozenset[str]
    prefixes: tuple[str, ...]

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "PredicateBlacklist":
        exact: set[str] = set()
        prefixes: list[str] = []
        for raw in lines:
            entry = raw.strip()
            if not entry or entry.startswith("#"):
                continue
            if entry.endswith("*"):
                prefixes.append(entry[:-1])
            else:
                exact.add(entry)
        return cls(exact=frozenset(exact), prefixes=tuple(prefixes))

    @classmethod
    def from_file(cls, path: Path | str) -> "PredicateBlacklist":
        return cls.from_lines(Path(path).read_text(encoding="utf-8").splitlines())

    @classmethod
    def default(cls) -> "PredicateBlacklist":
        text = resources.files("factpipe").joinpath("data", "blacklist.txt").read_text(encoding="utf-8")
        return cls.from_lines(text.splitlines())

    def matches(self, predicate_iri: str) -> bool:
        if predicate_iri in self.exact:
            return True
        return any(predicate_iri.startswith(prefix) for prefix in self.prefixes)


class TripleSource(Protocol):
    def one_hop(self, entity_iri: str) -> list[Triple]:
        """All triples with the entity in subject or object position."""
        ...


# Both directions in one round trip; BIND tags which side the entity is on.
_ONE_HOP_QUERY = """\
SELECT ?s ?p ?o ?dir WHERE {{
  {{ <{iri}> ?p ?o . BIND(<{iri}> AS ?s) BIND("out" AS ?dir) }}
  UNION
  {{ ?s ?p <{iri}> . BIND(<{iri}> AS ?o) BIND("in" AS ?dir) }}
}}
"""


def one_hop_query(entity_iri: str) -> str:
    if "://" not in entity_iri or any(c.isspace() for c in entity_iri) or ">" in entity_iri:
        raise ValueError(f"not a usable entity IRI: {entity_iri!r}")
    return _ONE_HOP_QUERY.format(iri=entity_iri)


def _parse_term(binding: dict) -> RdfTerm:
    kind = binding.get("type")
    value = binding.get("value", "")
    if kind == "uri":
        return RdfTerm(value=value, is_literal=False)
    if kind in ("literal", "typed-literal"):
        return RdfTerm(
            value=value,
            is_literal=True,
            datatype=binding.get("datatype"),
            lang=binding.get("xml:lang"),
        )
    raise MalformedResponse(f"unsupported term type in binding: {kind!r}")


class SparqlTripleSource:
    """TripleSource over a SPARQL transport (live or recorded).

    english_only drops literals carrying a non-English language tag;
    untagged literals (numbers, dates) always pass.
    """

    def __init__(self, transport: SparqlTransport, *, english_only: bool = True):
        self._transport = transport
        self._english_only = english_only

    def one_hop(self, entity_iri: str) -> list[Triple]:
        results = self._transport.execute(one_hop_query(entity_iri))
        try:
            bindings = results["results"]["bindings"]
        except (KeyError, TypeError) as exc:
            raise MalformedResponse(f"one-hop query returned unexpected shape: {exc}") from exc

        triples: list[Triple] = []
        for row in bindings:
            try:
                subject = row["s"]
                predicate = row["p"]
                obj = _parse_term(row["o"])
                direction_tag = row.get("dir", {}).get("value")
            except (KeyError, TypeError) as exc:
                raise MalformedResponse(f"one-hop binding missing fields: {exc}") from exc
            if subject.get("type") != "uri" or predicate.get("type") != "uri":
                # Blank-node subjects carry nothing verbalizable; skip them.
                continue
            if obj.is_literal and self._english_only and obj.lang and not obj.lang.lower().startswith("en"):
                continue
            direction = Direction.ENTITY_AS_SUBJECT if direction_tag == "out" else Direction.ENTITY_AS_OBJECT
            triples.append(
                Triple(subject=subject["value"], predicate=predicate["value"], object=obj, direction=direction)
            )
        return triples


def retrieve_one_hop(entity_iri: str, source: TripleSource, *, cap: int = TRIPLE_CAP) -> list[Triple]:
    """Fetch, de-duplicate, and cap the one-hop neighborhood of an entity.

    Duplicates (same subject, predicate, object, direction) keep their first
    occurrence; order is otherwise preserved. Exceeding the cap truncates
    with a warning rather than failing.
    """
    seen: set[tuple] = set()
    out: list[Triple] = []
    for triple in source.one_hop(entity_iri):
        key = (triple.subject, triple.predicate, triple.object, triple.direction)
        if key in seen:
            continue
        seen.add(key)
        out.append(triple)
    if len(out) > cap:
        log.warning("one-hop neighborhood of %s has %d triples; truncating to %d", entity_iri, len(out), cap)
        out = out[:cap]
    return out


def filter_meta_predicates(triples: list[Triple], blacklist: PredicateBlacklist) -> list[Triple]:
    """Drop triples whose predicate the blacklist matches; order is preserved."""
    return [t for t in triples if not blacklist.matches(t.predicate)]
