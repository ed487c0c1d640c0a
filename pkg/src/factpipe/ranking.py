"""Evidence verbalization and relevance ranking.

Candidates (verbalized triples or web snippets) are scored against the
claim by a pluggable backend and the top k survive. The lexical scorer is
the dependency-free fallback; the remote scorer speaks to a cross-encoder
sidecar; the fixture scorer replays recorded scores bit-exactly.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from typing import Protocol
from urllib.parse import unquote

from .domain import EvidenceItem, EvidenceKind, Triple

DEFAULT_K = 5

LEXICAL_SCORER = "lexical_fallback"
REMOTE_SCORER = "remote_cross_encoder"


@dataclass(frozen=True)
class RankingConfig:
    k: int = DEFAULT_K
    scorer_backend: str = LEXICAL_SCORER

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.scorer_backend not in (LEXICAL_SCORER, REMOTE_SCORER):
            raise ValueError(f"unknown scorer backend: {self.scorer_backend!r}")


@dataclass(frozen=True)
class ScoredCandidate:
    item: EvidenceItem
    score: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.score):
            raise ValueError("candidate score must be finite")


class ScorerBackend(Protocol):
    def score(self, claim_text: str, candidate_texts: list[str]) -> list[float]:
        """Relevance of each candidate to the claim, aligned with the input order."""
        ...


def local_name(iri: str) -> str:
    """Human-readable tail of an IRI: after the fragment, else after the last slash."""
    tail = iri.rsplit("#", 1)[-1]
    tail = tail.rsplit("/", 1)[-1]
    return unquote(tail)


def verbalize_triple(triple: Triple) -> str:
    """Flatten a triple to 'subject -> predicate -> object' using IRI local names.

    Literal objects keep their lexical form verbatim; IRI objects use their
    local name like subjects and predicates do.
    """
    obj = triple.object
    object_text = obj.value if obj.is_literal else local_name(obj.value)
    return f"{local_name(triple.subject)} -> {local_name(triple.predicate)} -> {object_text}"


class LexicalOverlapScorer:
    """Jaccard overlap between lowercased word sets; no model, no state.

    Tokenization splits on anything non-alphanumeric, so the underscores in
    IRI local names ("Arya_Stark") align with plain claim text.
    """

    _TOKEN_RE = re.compile(r"[a-z0-9]+")

    @classmethod
    def tokenize(cls, text: str) -> frozenset[str]:
        return frozenset(cls._TOKEN_RE.findall(text.lower()))

    def score(self, claim_text: str, candidate_texts: list[str]) -> list[float]:
        claim_tokens = self.tokenize(claim_text)
        scores = []
        for candidate in candidate_texts:
            tokens = self.tokenize(candidate)
            union = claim_tokens | tokens
            scores.append(len(claim_tokens & tokens) / len(union) if union else 0.0)
        return scores


def evidence_from_triple(triple: Triple) -> EvidenceItem:
    return EvidenceItem(
        text=verbalize_triple(triple),
        kind=EvidenceKind.KG_TRIPLE,
        source={"subject": triple.subject, "predicate": triple.predicate, "object": triple.object.value},
    )


def score_candidates(claim_text: str, candidates: list[EvidenceItem], backend: ScorerBackend) -> list[ScoredCandidate]:
    """Score every candidate against the claim, preserving candidate order."""
    if not candidates:
        raise ValueError("candidate list must be non-empty")
    scores = backend.score(claim_text, [c.text for c in candidates])
    if len(scores) != len(candidates):
        raise ValueError(f"scorer returned {len(scores)} scores for {len(candidates)} candidates")
    return [ScoredCandidate(item=item, score=score) for item, score in zip(candidates, scores)]


def select_top_k(scored: list[ScoredCandidate], k: int) -> list[EvidenceItem]:
    """Top k by score, descending; ties keep their input order (stable sort).

    Returns new EvidenceItems with the winning scores filled in.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    ranked = sorted(scored, key=lambda sc: -sc.score)
    return [replace(sc.item, score=sc.score) for sc in ranked[:k]]
