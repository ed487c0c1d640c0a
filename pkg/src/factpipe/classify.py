"""Verdict classification: LLM-prompted and NLI-based.

Both classifiers take the claim plus the ranked evidence list and return a
Verdict. The LLM path renders a stage prompt and parses a strict JSON
answer; the NLI path aggregates per-pair entailment judgments.
"""

from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Protocol

from .backends.chat import ChatBackend
from .domain import Claim, EvidenceItem, Label, Verdict
from .errors import MalformedModelOutput
from .prompts import load_template, render

log = logging.getLogger(__name__)

# Permitted output labels per prompt stage. The web stage and the zero-shot
# baseline are forced binary; NEI from either is a contract violation.
_PERMITTED: dict[str, frozenset[Label]] = {
    "kg": frozenset({Label.SUPPORTED, Label.REFUTED, Label.NEI}),
    "web": frozenset({Label.SUPPORTED, Label.REFUTED}),
    "zero_shot": frozenset({Label.SUPPORTED, Label.REFUTED}),
}


class NliClass(Enum):
    ENTAILMENT = 0
    NEUTRAL = 1
    CONTRADICTION = 2


def map_nli_label(nli_class: NliClass) -> Label:
    if nli_class is NliClass.ENTAILMENT:
        return Label.SUPPORTED
    if nli_class is NliClass.CONTRADICTION:
        return Label.REFUTED
    return Label.NEI


@dataclass(frozen=True)
class NliLogits:
    """Raw model scores in the fixed order (entailment, neutral, contradiction)."""

    entailment: float
    neutral: float
    contradiction: float

    def __post_init__(self) -> None:
        for value in (self.entailment, self.neutral, self.contradiction):
            if not math.isfinite(value):
                raise ValueError("NLI logits must be finite")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.entailment, self.neutral, self.contradiction)


def softmax(logits: NliLogits) -> tuple[float, float, float]:
    """Numerically stabilized softmax over the three logits."""
    values = logits.as_tuple()
    peak = max(values)
    exps = [math.exp(v - peak) for v in values]
    total = sum(exps)
    return tuple(e / total for e in exps)  # type: ignore[return-value]


@dataclass(frozen=True)
class NliJudgment:
    """One evidence/claim pair, classified."""

    probs: tuple[float, float, float]
    label: Label
    p_max: float

    @classmethod
    def from_logits(cls, logits: NliLogits) -> "NliJudgment":
        probs = softmax(logits)
        # argmax over logits equals argmax over softmax and dodges any
        # float-rounding reordering; ties go to the earlier class.
        values = logits.as_tuple()
        winner = NliClass(values.index(max(values)))
        return cls(probs=probs, label=map_nli_label(winner), p_max=max(probs))


class NliBackend(Protocol):
    def judge(self, pairs: list[tuple[str, str]]) -> list[NliLogits]:
        """Logits for (premise, hypothesis) pairs, aligned with input order."""
        ...


def classify_nli(claim: Claim, evidence: list[EvidenceItem], backend: NliBackend) -> Verdict:
    """Aggregate per-pair NLI judgments into one verdict.

    Evidence is the premise, the claim is the hypothesis. The winning pair
    is the non-neutral one with the highest p_max; exact ties prefer
    Refuted, then the earlier evidence index. All-neutral means NEI.
    """
    if not evidence:
        raise ValueError("evidence list must be non-empty")
    pairs = [(item.text, claim.text) for item in evidence]
    logits = backend.judge(pairs)
    if len(logits) != len(pairs):
        raise ValueError(f"NLI backend returned {len(logits)} judgments for {len(pairs)} pairs")
    judgments = [NliJudgment.from_logits(l) for l in logits]

    decisive = [(i, j) for i, j in enumerate(judgments) if j.label is not Label.NEI]
    if not decisive:
        return Verdict(label=Label.NEI, reason="No evidence pair was entailed or contradicted.", cited_evidence=())

    index, judgment = max(decisive, key=lambda pair: (pair[1].p_max, pair[1].label is Label.REFUTED, -pair[0]))
    relation = "entails" if judgment.label is Label.SUPPORTED else "contradicts"
    reason = f"Evidence {index + 1} {relation} the claim (p={judgment.p_max:.4f})."
    return Verdict(label=judgment.label, reason=reason, cited_evidence=(index,))


# --- LLM classification ----------------------------------------------------

_CITATION_RE = re.compile(r"(?i)\b(?:paths?|snippets?|evidence)\s+((?:\d+)(?:\s*(?:,|and|&)\s*\d+)*)")


def extract_citations(reason: str, evidence_count: int) -> tuple[int, ...]:
    """Zero-based evidence indices mentioned in a reason sentence.

    Picks up "Path 1", "Snippets 2 and 3", etc.; out-of-range numbers are
    dropped, order of first mention is kept.
    """
    indices: list[int] = []
    for match in _CITATION_RE.finditer(reason):
        for number in re.findall(r"\d+", match.group(1)):
            index = int(number) - 1
            if 0 <= index < evidence_count and index not in indices:
                indices.append(index)
    return tuple(indices)


def parse_verdict_json(raw: str, permitted: frozenset[Label]) -> tuple[Label, str]:
    """Parse the {"label": ..., "reason": ...} contract, strictly."""
    from .domain import parse_label
    from .errors import UnknownLabel

    text = raw.strip()
    try:
        payload = json.loads(text)
    except ValueError:
        # Models sometimes wrap the object in prose or code fences; accept
        # exactly one embedded object, nothing fancier.
        start, end = text.find("{"), text.rfind("}")
        if start == -1 or end <= start:
            raise MalformedModelOutput(f"expected a JSON object, got: {text[:200]!r}") from None
        try:
            payload = json.loads(text[start : end + 1])
        except ValueError:
            raise MalformedModelOutput(f"could not parse JSON object from: {text[:200]!r}") from None
    if not isinstance(payload, dict):
        raise MalformedModelOutput(f"expected a JSON object, got {type(payload).__name__}")
    if "label" not in payload or "reason" not in payload:
        raise MalformedModelOutput("verdict JSON must carry 'label' and 'reason'")
    if not isinstance(payload["label"], str) or not isinstance(payload["reason"], str):
        raise MalformedModelOutput("'label' and 'reason' must be strings")
    try:
        label = parse_label(payload["label"])
    except UnknownLabel as exc:
        raise MalformedModelOutput(str(exc)) from exc
    if label not in permitted:
        raise MalformedModelOutput(f"label {label.serialize()!r} is not permitted for this stage")
    return label, payload["reason"]


def _complete_with_retry(chat: ChatBackend, system_text: str, user_text: str, parse):
    """One retry with the identical prompt on malformed output, then surface."""
    last: MalformedModelOutput | None = None
    for attempt in range(2):
        raw = chat.complete(system_text, user_text)
        try:
            return parse(raw)
        except MalformedModelOutput as exc:
            last = exc
            log.warning("malformed model output (attempt %d): %s", attempt + 1, exc)
    assert last is not None
    raise last


def classify_llm(claim: Claim, evidence: list[EvidenceItem], stage: str, chat: ChatBackend) -> Verdict:
    """Prompt the chat model with the stage template over ranked evidence."""
    if stage not in ("kg", "web"):
        raise ValueError(f"classify_llm handles stages 'kg' and 'web', not {stage!r}")
    if not evidence:
        raise ValueError("evidence list must be non-empty")
    template = load_template(stage)
    system_text, user_text = render(template, claim.text, [item.text for item in evidence])
    label, reason = _complete_with_retry(
        chat, system_text, user_text, lambda raw: parse_verdict_json(raw, _PERMITTED[stage])
    )
    return Verdict(label=label, reason=reason, cited_evidence=extract_citations(reason, len(evidence)))


def classify_zero_shot(claim: Claim, chat: ChatBackend) -> Verdict:
    """Evidence-free binary baseline; never cites and never abstains."""
    template = load_template("zero_shot")
    system_text, user_text = render(template, claim.text)
    label, reason = _complete_with_retry(
        chat, system_text, user_text, lambda raw: parse_verdict_json(raw, _PERMITTED["zero_shot"])
    )
    return Verdict(label=label, reason=reason, cited_evidence=())
