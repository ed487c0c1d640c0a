"""Recorded-fixture plumbing shared by every replayable backend.

A fixture is one JSON file per request, named by a digest of the request
content and grouped in per-backend subdirectories (chat/, sparql/, search/,
score/, nli/). Replay is bit-exact: a backend in fixture mode either finds
the recorded response or raises its usual unavailability error, it never
improvises.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

from .domain import Direction, RdfTerm, Triple

# Request parts are joined on an ASCII record separator before hashing so
# ("ab", "c") and ("a", "bc") cannot collide.
_SEP = "\x1e"


def fixture_key(*parts: str) -> str:
    digest = hashlib.sha256(_SEP.join(parts).encode("utf-8")).hexdigest()
    return digest[:32]


def fixture_path(root: Path | str, kind: str, key: str) -> Path:
    return Path(root) / kind / f"{key}.json"


def read_fixture(root: Path | str, kind: str, key: str) -> Any | None:
    path = fixture_path(root, kind, key)
    if not path.is_file():
        return None
    return json.loads(path.read_text(encoding="utf-8"))["response"]


def write_fixture(root: Path | str, kind: str, key: str, request: Any, response: Any) -> Path:
    """Record a response; the request is stored alongside for human debugging."""
    path = fixture_path(root, kind, key)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"request": request, "response": response}
    path.write_text(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


# --- SPARQL result synthesis for recorded endpoints --------------------------


def term_binding(term: RdfTerm) -> dict:
    """One value in SPARQL JSON results form."""
    if not term.is_literal:
        return {"type": "uri", "value": term.value}
    binding: dict[str, str] = {"type": "literal", "value": term.value}
    if term.datatype:
        binding["datatype"] = term.datatype
    if term.lang:
        binding["xml:lang"] = term.lang
    return binding


def one_hop_results(triples: Iterable[Triple], extra_rows: Sequence[dict] = ()) -> dict:
    """SPARQL JSON a live endpoint would return for a one-hop query.

    extra_rows lets fixture authors splice in deliberately odd bindings
    (blank nodes, junk) to exercise client-side filtering.
    """
    bindings = []
    for triple in triples:
        direction = "out" if triple.direction is Direction.ENTITY_AS_SUBJECT else "in"
        bindings.append(
            {
                "s": {"type": "uri", "value": triple.subject},
                "p": {"type": "uri", "value": triple.predicate},
                "o": term_binding(triple.object),
                "dir": {"type": "literal", "value": direction},
            }
        )
    bindings.extend(extra_rows)
    return {"head": {"vars": ["s", "p", "o", "dir"]}, "results": {"bindings": bindings}}


def sameas_results(dbpedia_iri: str | None) -> dict:
    """SPARQL JSON for a Wikidata-to-DBpedia sameAs lookup."""
    bindings = [] if dbpedia_iri is None else [{"resource": {"type": "uri", "value": dbpedia_iri}}]
    return {"head": {"vars": ["resource"]}, "results": {"bindings": bindings}}
