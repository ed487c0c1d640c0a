"""Model backends behind the HTTP surface.

Two families, chosen by name. Names starting with "builtin:" select the
deterministic in-process models below, which need no downloads and exist so
the service (and anything integrating against it) can run in a sealed
environment. Any other name is treated as a Hugging Face checkpoint id and
loaded lazily, so the heavyweight libraries are only imported when a real
model is requested.

Whatever the family, the wire order for NLI logits is fixed to
(entailment, neutral, contradiction); checkpoint-specific label orders are
permuted here, never by clients.
"""

from __future__ import annotations

import re
from typing import Protocol

DEFAULT_SCORER_MODEL = "cross-encoder/ms-marco-MiniLM-L6-v2"
DEFAULT_NLI_MODEL = "microsoft/deberta-large-mnli"

BUILTIN_PREFIX = "builtin:"
BUILTIN_SCORER = "builtin:overlap"
BUILTIN_NLI = "builtin:heuristic"


class ModelLoadError(RuntimeError):
    """A requested model could not be constructed."""


class RelevanceModel(Protocol):
    name: str

    def score(self, claim: str, candidates: list[str]) -> list[float]:
        """One finite score per candidate, aligned with the input order."""
        ...


class NliModel(Protocol):
    name: str

    def logits(self, pairs: list[tuple[str, str]]) -> list[tuple[float, float, float]]:
        """(entail, neutral, contradict) logits per pair, aligned with the input order."""
        ...


_TOKEN = re.compile(r"[a-z0-9]+")

# Function words ignored when measuring whether a hypothesis is covered by
# its premise; they match almost any sentence pair.
_STOPWORDS = frozenset(
    "a an the is are was were be been being of in on at to by for with and or s it its".split()
)
_NEGATIONS = frozenset({"not", "no", "never", "none", "neither", "nor", "cannot"})


def _tokens(text: str) -> set[str]:
    return set(_TOKEN.findall(text.lower()))


def _content_tokens(text: str) -> set[str]:
    return _tokens(text) - _STOPWORDS


def _negated(text: str) -> bool:
    return bool(_tokens(text) & _NEGATIONS) or "n't" in text.lower()


class OverlapRelevanceModel:
    """Jaccard overlap between claim and candidate token sets.

    A stand-in with the same shape as a cross-encoder: deterministic, pure,
    and monotone in shared vocabulary, which is all the contract tests and
    offline deployments need.
    """

    name = BUILTIN_SCORER

    def score(self, claim: str, candidates: list[str]) -> list[float]:
        claim_tokens = _tokens(claim)
        out = []
        for candidate in candidates:
            candidate_tokens = _tokens(candidate)
            union = claim_tokens | candidate_tokens
            out.append(len(claim_tokens & candidate_tokens) / len(union) if union else 0.0)
        return out


class HeuristicNliModel:
    """Containment-plus-negation heuristic emitting 3-way logits.

    The entail/contradict signal is how much of the hypothesis's content
    vocabulary the premise covers; a negation marker on exactly one side
    routes that signal to the contradiction slot instead. Low coverage lands
    in neutral either way.
    """

    name = BUILTIN_NLI

    def logits(self, pairs: list[tuple[str, str]]) -> list[tuple[float, float, float]]:
        out = []
        for premise, hypothesis in pairs:
            hypothesis_content = _content_tokens(hypothesis)
            coverage = (
                len(hypothesis_content & _content_tokens(premise)) / len(hypothesis_content)
                if hypothesis_content
                else 0.0
            )
            signal = 4.0 * coverage - 1.2
            neutral = 0.8 - 2.0 * coverage
            if _negated(premise) != _negated(hypothesis):
                out.append((-3.0, neutral, signal))
            else:
                out.append((signal, neutral, -3.0))
        return out


class CrossEncoderModel:
    """sentence-transformers CrossEncoder checkpoint, eval mode, CPU-friendly."""

    def __init__(self, name: str):
        try:
            from sentence_transformers import CrossEncoder
        except ImportError as exc:
            raise ModelLoadError(f"model {name!r} needs the sentence-transformers extra: {exc}") from exc
        try:
            self._model = CrossEncoder(name)
        except Exception as exc:  # noqa: BLE001 - hub/IO failures vary by version
            raise ModelLoadError(f"could not load cross-encoder {name!r}: {exc}") from exc
        self.name = name

    def score(self, claim: str, candidates: list[str]) -> list[float]:
        predictions = self._model.predict([(claim, candidate) for candidate in candidates])
        return [float(p) for p in predictions]


class HfNliModel:
    """transformers sequence-classification checkpoint with label-order permutation."""

    def __init__(self, name: str):
        try:
            import torch
            from transformers import AutoModelForSequenceClassification, AutoTokenizer
        except ImportError as exc:
            raise ModelLoadError(f"model {name!r} needs the transformers extra: {exc}") from exc
        try:
            self._tokenizer = AutoTokenizer.from_pretrained(name)
            self._model = AutoModelForSequenceClassification.from_pretrained(name)
        except Exception as exc:  # noqa: BLE001
            raise ModelLoadError(f"could not load NLI model {name!r}: {exc}") from exc
        self._model.eval()
        self._torch = torch
        self._permutation = _label_permutation(self._model.config.id2label, name)
        self.name = name

    def logits(self, pairs: list[tuple[str, str]]) -> list[tuple[float, float, float]]:
        encoded = self._tokenizer(
            [p for p, _ in pairs], [h for _, h in pairs],
            padding=True, truncation=True, return_tensors="pt",
        )
        with self._torch.no_grad():
            rows = self._model(**encoded).logits.tolist()
        e, n, c = self._permutation
        return [(float(row[e]), float(row[n]), float(row[c])) for row in rows]


def _label_permutation(id2label: dict[int, str], name: str) -> tuple[int, int, int]:
    """Indices of (entail, neutral, contradict) in the checkpoint's own order."""
    found: dict[str, int] = {}
    for index, label in id2label.items():
        key = label.lower()
        for want in ("entail", "neutral", "contradict"):
            if key.startswith(want):
                found[want] = int(index)
    missing = [want for want in ("entail", "neutral", "contradict") if want not in found]
    if missing:
        raise ModelLoadError(
            f"NLI model {name!r} labels {list(id2label.values())} do not cover {missing}"
        )
    return found["entail"], found["neutral"], found["contradict"]


def load_relevance_model(name: str) -> RelevanceModel:
    if name == BUILTIN_SCORER:
        return OverlapRelevanceModel()
    if name.startswith(BUILTIN_PREFIX):
        raise ModelLoadError(f"unknown builtin relevance model {name!r}; try {BUILTIN_SCORER!r}")
    return CrossEncoderModel(name)


def load_nli_model(name: str) -> NliModel:
    if name == BUILTIN_NLI:
        return HeuristicNliModel()
    if name.startswith(BUILTIN_PREFIX):
        raise ModelLoadError(f"unknown builtin NLI model {name!r}; try {BUILTIN_NLI!r}")
    return HfNliModel(name)
