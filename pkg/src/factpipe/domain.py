"""Core value types shared by every pipeline stage.

Everything here is an immutable dataclass or enum. Construction validates
the invariants the rest of the code relies on, so a value that exists is a
value that is well-formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import UnknownLabel


class Label(Enum):
    """Three-way verification label."""

    SUPPORTED = "Supported"
    REFUTED = "Refuted"
    NEI = "Not Enough Info"

    def serialize(self) -> str:
        return self.value


# Accepted input spellings, keyed by their normalized form. Covers both our
# serialization ("Supported") and FEVER-style dataset labels ("SUPPORTS",
# "NOT ENOUGH INFO", including the underscore variant seen in some dumps).
_LABEL_SPELLINGS: dict[str, Label] = {
    "supported": Label.SUPPORTED,
    "supports": Label.SUPPORTED,
    "refuted": Label.REFUTED,
    "refutes": Label.REFUTED,
    "not enough info": Label.NEI,
    "not enough information": Label.NEI,
    "nei": Label.NEI,
}


def parse_label(raw: str) -> Label:
    """Parse a label string in any accepted spelling, case-insensitively.

    Raises UnknownLabel for empty input or anything outside the closed set.
    """
    if raw is None or not raw.strip():
        raise UnknownLabel("empty label string")
    key = " ".join(raw.replace("_", " ").lower().split())
    try:
        return _LABEL_SPELLINGS[key]
    except KeyError:
        raise UnknownLabel(f"unrecognized label: {raw!r}") from None


@dataclass(frozen=True)
class Claim:
    """A single checkable statement, optionally with its gold label."""

    id: str
    text: str
    gold_label: Label | None = None

    def __post_init__(self) -> None:
        if not self.id or not self.id.strip():
            raise ValueError("claim id must be non-empty")
        if not self.text or not self.text.strip():
            raise ValueError("claim text must be non-empty")


class Direction(Enum):
    """Which position the linked entity occupies in a retrieved triple."""

    ENTITY_AS_SUBJECT = "entity-as-subject"
    ENTITY_AS_OBJECT = "entity-as-object"


@dataclass(frozen=True)
class RdfTerm:
    """Object position of a triple: an IRI, or a literal with its lexical form.

    Literals keep their datatype IRI and language tag when present; IRIs
    carry neither.
    """

    value: str
    is_literal: bool = False
    datatype: str | None = None
    lang: str | None = None

    def __post_init__(self) -> None:
        if not self.value:
            raise ValueError("rdf term value must be non-empty")
        if not self.is_literal and (self.datatype is not None or self.lang is not None):
            raise ValueError("datatype and language tag only apply to literals")


def _iri_shaped(value: str) -> bool:
    # Cheap structural check, not full IRI validation: a scheme separator
    # and no whitespace is enough to reject lexical garbage.
    return bool(value) and ":" in value and not any(c.isspace() for c in value)


@dataclass(frozen=True)
class Triple:
    """One-hop RDF triple anchored on a linked entity."""

    subject: str
    predicate: str
    object: RdfTerm
    direction: Direction

    def __post_init__(self) -> None:
        if not _iri_shaped(self.subject):
            raise ValueError(f"triple subject is not IRI-shaped: {self.subject!r}")
        if not _iri_shaped(self.predicate):
            raise ValueError(f"triple predicate is not IRI-shaped: {self.predicate!r}")


class EvidenceKind(Enum):
    KG_TRIPLE = "kg_triple"
    WEB_SNIPPET = "web_snippet"


@dataclass(frozen=True)
class EvidenceItem:
    """A ranked piece of evidence handed to the verdict classifier.

    source carries provenance: the triple's IRIs for KG evidence, the page
    URL for web evidence.
    """

    text: str
    kind: EvidenceKind
    source: dict[str, str] | str
    score: float = 0.0

    def __post_init__(self) -> None:
        if not self.text or not self.text.strip():
            raise ValueError("evidence text must be non-empty")
        if not math.isfinite(self.score):
            raise ValueError("evidence score must be finite")
        if self.kind is EvidenceKind.KG_TRIPLE:
            if not isinstance(self.source, dict) or not {"subject", "predicate", "object"} <= self.source.keys():
                raise ValueError("kg evidence source must carry subject/predicate/object IRIs")
        else:
            if not isinstance(self.source, str) or not self.source:
                raise ValueError("web evidence source must be a non-empty URL")


@dataclass(frozen=True)
class Verdict:
    """Classifier decision over one claim and its evidence list.

    cited_evidence holds zero-based indices into that evidence list.
    """

    label: Label
    reason: str
    cited_evidence: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.label is not Label.NEI and not self.reason.strip():
            raise ValueError("Supported/Refuted verdicts must carry a reason")
        if any(i < 0 for i in self.cited_evidence):
            raise ValueError("cited evidence indices must be non-negative")


class Stage(Enum):
    """Pipeline stage that produced the final verdict."""

    KG = "kg"
    WEB = "web"
    NONE = "none"


@dataclass(frozen=True)
class VerificationResult:
    """Full outcome of verifying one claim."""

    claim_id: str
    final_label: Label
    stage: Stage
    evidence: tuple[EvidenceItem, ...]
    verdict: Verdict
    fallback_used: bool
    latency_ms: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.fallback_used != (self.stage is Stage.WEB):
            raise ValueError("fallback_used must hold exactly when the web stage decided")

    def to_json_dict(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "final_label": self.final_label.serialize(),
            "stage": self.stage.value,
            "evidence": [
                {"text": e.text, "kind": e.kind.value, "source": e.source, "score": e.score}
                for e in self.evidence
            ],
            "verdict": {
                "label": self.verdict.label.serialize(),
                "reason": self.verdict.reason,
                "cited_evidence": list(self.verdict.cited_evidence),
            },
            "fallback_used": self.fallback_used,
            "latency_ms": dict(self.latency_ms),
        }


def result_from_json(payload: dict) -> VerificationResult:
    """Inverse of VerificationResult.to_json_dict."""
    evidence = tuple(
        EvidenceItem(
            text=e["text"],
            kind=EvidenceKind(e["kind"]),
            source=e["source"],
            score=float(e.get("score", 0.0)),
        )
        for e in payload["evidence"]
    )
    verdict = Verdict(
        label=parse_label(payload["verdict"]["label"]),
        reason=payload["verdict"]["reason"],
        cited_evidence=tuple(int(i) for i in payload["verdict"].get("cited_evidence", [])),
    )
    return VerificationResult(
        claim_id=payload["claim_id"],
        final_label=parse_label(payload["final_label"]),
        stage=Stage(payload["stage"]),
        evidence=evidence,
        verdict=verdict,
        fallback_used=bool(payload["fallback_used"]),
        latency_ms={k: float(v) for k, v in payload.get("latency_ms", {}).items()},
    )
