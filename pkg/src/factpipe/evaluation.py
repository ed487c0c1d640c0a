"""Dataset loading, sampling, and metric computation.

Benchmarks arrive as JSONL with per-dataset field names and label
spellings; adapters normalize them into Claims. Metrics are macro-averaged
over the classes present in the gold labels.
"""

from __future__ import annotations

import json
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .domain import Claim, Label, Stage, VerificationResult, Verdict, parse_label, result_from_json
from .errors import FormatError, LengthMismatch, PipelineError, UnknownLabel

log = logging.getLogger(__name__)

MODE_SR = "sr"
MODE_SRN = "srn"


@dataclass(frozen=True)
class DatasetAdapter:
    """Field names and label spellings for one benchmark's JSONL flavor."""

    name: str
    id_field: str = "id"
    claim_field: str = "claim"
    label_field: str = "label"
    # Spellings beyond the standard ones, e.g. boolean-style labels.
    label_aliases: dict[str, Label] = field(default_factory=dict)

    def parse_dataset_label(self, raw: object) -> Label:
        key = str(raw).strip().lower()
        if key in self.label_aliases:
            return self.label_aliases[key]
        return parse_label(str(raw))


FEVER = DatasetAdapter(name="fever")
FEVER2 = DatasetAdapter(name="fever2")
FACTKG = DatasetAdapter(
    name="factkg",
    label_aliases={"true": Label.SUPPORTED, "false": Label.REFUTED, "1": Label.SUPPORTED, "0": Label.REFUTED},
)

ADAPTERS = {adapter.name: adapter for adapter in (FEVER, FEVER2, FACTKG)}


def load_fever_jsonl(path: Path | str, adapter: DatasetAdapter = FEVER) -> list[Claim]:
    """Load a labeled claim file, scanning every line before giving up.

    All malformed lines (bad JSON, missing fields, unknown labels, duplicate
    ids) are collected into one FormatError so a broken file is diagnosed in
    a single pass.
    """
    problems: list[tuple[int, str]] = []
    claims: list[Claim] = []
    seen_ids: set[str] = set()
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except ValueError as exc:
            problems.append((line_no, f"invalid JSON: {exc}"))
            continue
        if not isinstance(record, dict):
            problems.append((line_no, "record is not a JSON object"))
            continue
        missing = [f for f in (adapter.id_field, adapter.claim_field, adapter.label_field) if f not in record]
        if missing:
            problems.append((line_no, f"missing fields: {', '.join(missing)}"))
            continue
        claim_id = str(record[adapter.id_field])
        claim_text = record[adapter.claim_field]
        if not isinstance(claim_text, str) or not claim_text.strip():
            problems.append((line_no, "claim text is empty"))
            continue
        try:
            label = adapter.parse_dataset_label(record[adapter.label_field])
        except UnknownLabel as exc:
            problems.append((line_no, str(exc)))
            continue
        if claim_id in seen_ids:
            problems.append((line_no, f"duplicate claim id: {claim_id}"))
            continue
        seen_ids.add(claim_id)
        claims.append(Claim(id=claim_id, text=claim_text, gold_label=label))
    if problems:
        raise FormatError(problems)
    return claims


def sample_sr_subset(claims: Sequence[Claim], n: int, seed: int) -> list[Claim]:
    """Seed-deterministic sample of Supported/Refuted claims.

    NEI and unlabeled claims never enter the pool. The pool is sorted by
    claim id before sampling so the draw does not depend on input order.
    A pool smaller than n returns everything, with a warning.
    """
    if n < 1:
        raise ValueError("sample size must be at least 1")
    pool = [c for c in claims if c.gold_label in (Label.SUPPORTED, Label.REFUTED)]
    pool.sort(key=lambda c: c.id)
    if len(pool) <= n:
        if len(pool) < n:
            log.warning("sample pool has only %d claims, requested %d; returning all", len(pool), n)
        return pool
    return random.Random(seed).sample(pool, n)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class MetricsReport:
    mode: str
    accuracy: float
    precision: float
    recall: float
    f1: float
    per_class: dict[Label, ClassMetrics]
    n: int
    fallback_rate: float | None = None

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "n": self.n,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "fallback_rate": self.fallback_rate,
            "per_class": {
                label.serialize(): {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for label, m in self.per_class.items()
            },
        }

    def format_table(self) -> str:
        lines = [
            f"mode={self.mode}  n={self.n}  accuracy={self.accuracy:.4f}",
            f"macro: precision={self.precision:.4f}  recall={self.recall:.4f}  f1={self.f1:.4f}",
        ]
        if self.fallback_rate is not None:
            lines.append(f"fallback_rate={self.fallback_rate:.4f}")
        for label, m in self.per_class.items():
            lines.append(
                f"  {label.serialize():<16} precision={m.precision:.4f}  recall={m.recall:.4f}"
                f"  f1={m.f1:.4f}  support={m.support}"
            )
        return "\n".join(lines)


def compute_metrics(
    gold: Sequence[Label],
    predicted: Sequence[Label],
    mode: str = MODE_SRN,
    fallback_rate: float | None = None,
) -> MetricsReport:
    """Per-class precision/recall/F1 plus macro averages and accuracy.

    Macro averages run over the classes present in gold. In "sr" mode the
    gold labels must be binary; a predicted NEI then scores as an error
    against the gold class (it is nobody's true positive).
    Undefined ratios (zero denominators) score 0.0.
    """
    if mode not in (MODE_SR, MODE_SRN):
        raise ValueError(f"unknown metrics mode: {mode!r}")
    if len(gold) != len(predicted):
        raise LengthMismatch(f"{len(gold)} gold labels vs {len(predicted)} predictions")
    if not gold:
        raise ValueError("cannot compute metrics over zero instances")
    if mode == MODE_SR and any(g is Label.NEI for g in gold):
        raise ValueError("sr mode requires gold labels without Not Enough Info")

    label_space = (Label.SUPPORTED, Label.REFUTED) if mode == MODE_SR else (Label.SUPPORTED, Label.REFUTED, Label.NEI)
    present = [label for label in label_space if label in gold]
    per_class: dict[Label, ClassMetrics] = {}
    for label in present:
        tp = sum(1 for g, p in zip(gold, predicted) if g is label and p is label)
        fp = sum(1 for g, p in zip(gold, predicted) if g is not label and p is label)
        fn = sum(1 for g, p in zip(gold, predicted) if g is label and p is not label)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[label] = ClassMetrics(precision=precision, recall=recall, f1=f1, support=tp + fn)

    def macro(pick: Callable[[ClassMetrics], float]) -> float:
        return sum(pick(per_class[label]) for label in present) / len(present)

    accuracy = sum(1 for g, p in zip(gold, predicted) if g is p) / len(gold)
    return MetricsReport(
        mode=mode,
        accuracy=accuracy,
        precision=macro(lambda m: m.precision),
        recall=macro(lambda m: m.recall),
        f1=macro(lambda m: m.f1),
        per_class=per_class,
        n=len(gold),
        fallback_rate=fallback_rate,
    )


def fallback_rate(results: Sequence[VerificationResult]) -> float:
    """Fraction of claims the web stage decided."""
    if not results:
        raise ValueError("cannot compute a fallback rate over zero results")
    return sum(1 for r in results if r.fallback_used) / len(results)


def run_eval(
    claims: Sequence[Claim],
    predict: Callable[[Claim], VerificationResult],
    *,
    workers: int = 1,
    on_error: str = "raise",
) -> list[VerificationResult]:
    """Run the predictor over every claim, preserving input order.

    on_error="nei" substitutes a stage-less NEI result for claims whose
    verification raised PipelineError, so long live runs survive flaky
    backends; the substitution is logged loudly.
    """
    if on_error not in ("raise", "nei"):
        raise ValueError(f"unknown on_error policy: {on_error!r}")

    def one(claim: Claim) -> VerificationResult:
        try:
            return predict(claim)
        except PipelineError as exc:
            if on_error == "raise":
                raise
            log.error("claim %s failed, recording Not Enough Info: %s", claim.id, exc)
            verdict = Verdict(label=Label.NEI, reason=f"verification failed: {exc}", cited_evidence=())
            return VerificationResult(
                claim_id=claim.id,
                final_label=Label.NEI,
                stage=Stage.NONE,
                evidence=(),
                verdict=verdict,
                fallback_used=False,
            )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, claims))
    return [one(claim) for claim in claims]


def write_results_jsonl(results: Iterable[VerificationResult], path: Path | str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for result in results:
            handle.write(json.dumps(result.to_json_dict(), ensure_ascii=False) + "\n")


def read_results_jsonl(path: Path | str) -> list[VerificationResult]:
    results = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            results.append(result_from_json(json.loads(line)))
    return results
