"""Re-annotation toolkit: ad-hoc CSV worksheets and agreement statistics.

The worksheet targets claims the dataset called Not Enough Info but the
pipeline decided anyway; human annotators then judge whether the found
evidence was sufficient. Agreement is quantified with Fleiss' and Cohen's
kappa.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

from .backends.chat import ChatBackend
from .domain import Claim, EvidenceKind, Label, VerificationResult
from .errors import CoverageMismatch, LengthMismatch, MalformedMatrix, MalformedModelOutput

log = logging.getLogger(__name__)

CSV_COLUMNS = ("nr", "claim", "true_label", "predicted_label", "found_evidence", "llm_explanation", "human_annotated", "notes")

SUFFICIENT = "sufficient"
NOT_SUFFICIENT = "not sufficient"

# The dataset's own spelling for the class these worksheets are drawn from.
_NEI_DATASET_SPELLING = "NOT ENOUGH INFO"


@dataclass(frozen=True)
class AnnotationRow:
    nr: int
    claim: str
    true_label: str
    predicted_label: str
    found_evidence: str
    llm_explanation: str
    human_annotated: str = ""
    notes: str = ""

    def __post_init__(self) -> None:
        if self.nr < 1:
            raise ValueError("row numbers start at 1")
        normalized = self.human_annotated.strip().lower()
        if normalized not in ("", SUFFICIENT, NOT_SUFFICIENT):
            raise ValueError(f"human_annotated must be empty, {SUFFICIENT!r}, or {NOT_SUFFICIENT!r}")


def _evidence_block(result: VerificationResult) -> str:
    lines = []
    for i, item in enumerate(result.evidence, start=1):
        prefix = "Path" if item.kind is EvidenceKind.KG_TRIPLE else "Snippet"
        lines.append(f"{prefix} {i}: {item.text}")
    return "\n".join(lines)


def sample_nei_rows(
    results: Sequence[VerificationResult],
    claims: Sequence[Claim],
    n: int = 150,
    seed: int = 0,
) -> list[AnnotationRow]:
    """Pick gold-NEI claims the pipeline labeled Supported or Refuted.

    Sampling is seed-deterministic and independent of input order (the pool
    is sorted by claim id first). Pools smaller than n export everything,
    with a warning.
    """
    if n < 1:
        raise ValueError("sample size must be at least 1")
    by_id = {c.id: c for c in claims}
    pool = []
    for result in results:
        claim = by_id.get(result.claim_id)
        if claim is None or claim.gold_label is not Label.NEI:
            continue
        if result.final_label is Label.NEI:
            continue
        pool.append((claim, result))
    pool.sort(key=lambda pair: pair[0].id)
    if len(pool) < n:
        log.warning("only %d overturned NEI claims available, requested %d; exporting all", len(pool), n)
        chosen = pool
    elif len(pool) == n:
        chosen = pool
    else:
        chosen = random.Random(seed).sample(pool, n)

    rows = []
    for nr, (claim, result) in enumerate(chosen, start=1):
        rows.append(
            AnnotationRow(
                nr=nr,
                claim=claim.text,
                true_label=_NEI_DATASET_SPELLING,
                predicted_label=result.final_label.serialize(),
                found_evidence=_evidence_block(result),
                llm_explanation=result.verdict.reason,
            )
        )
    return rows


def render_annotation_csv(rows: Sequence[AnnotationRow]) -> str:
    """Serialize rows with a header, LF line endings, minimal quoting."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(
            [row.nr, row.claim, row.true_label, row.predicted_label, row.found_evidence, row.llm_explanation, row.human_annotated, row.notes]
        )
    return buffer.getvalue()


def export_nei_csv(
    results: Sequence[VerificationResult],
    claims: Sequence[Claim],
    n: int = 150,
    seed: int = 0,
) -> str:
    """Sampled worksheet as CSV text; same inputs and seed give identical bytes."""
    return render_annotation_csv(sample_nei_rows(results, claims, n=n, seed=seed))


def read_annotation_csv(source: Path | str) -> list[AnnotationRow]:
    """Read a worksheet back, annotated or not. Accepts a path or CSV text."""
    # CSV text always contains a newline; a path never does.
    if isinstance(source, Path) or "\n" not in source:
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = str(source)
    reader = csv.DictReader(io.StringIO(text))
    missing = [c for c in CSV_COLUMNS if c not in (reader.fieldnames or [])]
    if missing:
        raise ValueError(f"annotation CSV is missing columns: {', '.join(missing)}")
    rows = []
    for record in reader:
        rows.append(
            AnnotationRow(
                nr=int(record["nr"]),
                claim=record["claim"],
                true_label=record["true_label"],
                predicted_label=record["predicted_label"],
                found_evidence=record["found_evidence"],
                llm_explanation=record["llm_explanation"],
                human_annotated=record.get("human_annotated", ""),
                notes=record.get("notes", ""),
            )
        )
    return rows


# --- agreement statistics ---------------------------------------------------


@dataclass(frozen=True)
class AgreementMatrix:
    """Items-by-categories count matrix; each row sums to the rater count."""

    counts: tuple[tuple[int, ...], ...]
    raters: int
    categories: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.raters < 2:
            raise MalformedMatrix("agreement needs at least two raters")
        if not self.counts:
            raise MalformedMatrix("agreement needs at least one item")
        width = len(self.categories)
        for i, row in enumerate(self.counts):
            if len(row) != width:
                raise MalformedMatrix(f"row {i} has {len(row)} categories, expected {width}")
            if any(c < 0 for c in row):
                raise MalformedMatrix(f"row {i} has negative counts")
            if sum(row) != self.raters:
                raise MalformedMatrix(f"row {i} sums to {sum(row)}, expected {self.raters}")

    @classmethod
    def from_judgments(cls, per_rater: Sequence[Sequence[str]], categories: Sequence[str] | None = None) -> "AgreementMatrix":
        """Build from aligned per-rater judgment lists."""
        if len(per_rater) < 2:
            raise MalformedMatrix("agreement needs at least two raters")
        lengths = {len(j) for j in per_rater}
        if len(lengths) != 1:
            raise LengthMismatch(f"raters cover different item counts: {sorted(lengths)}")
        if categories is None:
            categories = sorted({j for judgments in per_rater for j in judgments})
        index = {c: i for i, c in enumerate(categories)}
        n_items = len(per_rater[0])
        counts = []
        for item in range(n_items):
            row = [0] * len(categories)
            for judgments in per_rater:
                value = judgments[item]
                if value not in index:
                    raise MalformedMatrix(f"judgment {value!r} outside categories {list(categories)}")
                row[index[value]] += 1
            counts.append(tuple(row))
        return cls(counts=tuple(counts), raters=len(per_rater), categories=tuple(categories))


def fleiss_kappa(matrix: AgreementMatrix) -> float:
    """Fleiss' kappa over the count matrix.

    Returns NaN when expected agreement is 1 (all mass in one category),
    where the statistic is undefined.
    """
    n = matrix.raters
    rows = matrix.counts
    # Per-item observed agreement, then the category marginals.
    p_bar = sum((sum(c * c for c in row) - n) / (n * (n - 1)) for row in rows) / len(rows)
    totals = [sum(row[j] for row in rows) for j in range(len(matrix.categories))]
    grand = len(rows) * n
    p_e = sum((t / grand) ** 2 for t in totals)
    if math.isclose(p_e, 1.0, rel_tol=0.0, abs_tol=1e-15):
        return math.nan
    return (p_bar - p_e) / (1.0 - p_e)


def cohen_kappa(a: Sequence[str], b: Sequence[str]) -> float:
    """Cohen's kappa between two raters; NaN when chance agreement is 1."""
    if len(a) != len(b):
        raise LengthMismatch(f"rater a has {len(a)} items, rater b has {len(b)}")
    if not a:
        raise ValueError("cannot compute agreement over zero items")
    n = len(a)
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n
    categories = set(a) | set(b)
    p_e = sum((list(a).count(c) / n) * (list(b).count(c) / n) for c in categories)
    if math.isclose(p_e, 1.0, rel_tol=0.0, abs_tol=1e-15):
        return math.nan
    return (p_o - p_e) / (1.0 - p_e)


def _judgments_by_item(rows: Sequence[AnnotationRow]) -> dict[int, str]:
    out: dict[int, str] = {}
    for row in rows:
        value = row.human_annotated.strip().lower()
        if value:
            out[row.nr] = value
    return out


def sufficiency_stats(
    per_annotator: Mapping[str, Sequence[AnnotationRow]],
    llm_rows: Sequence[AnnotationRow] | None = None,
) -> dict:
    """Agreement report over annotated worksheets.

    All annotators must cover the same item set (by nr); blank judgments
    count as not covering the item. The optional LLM worksheet adds
    pairwise kappas against each human and a confusion matrix against the
    human majority (ties are excluded from the matrix and counted).
    """
    if len(per_annotator) < 2:
        raise CoverageMismatch("need at least two annotators")
    judgments = {name: _judgments_by_item(rows) for name, rows in per_annotator.items()}
    item_sets = {name: set(j) for name, j in judgments.items()}
    reference = sorted(set.union(*item_sets.values()))
    for name, items in item_sets.items():
        if items != set(reference):
            missing = sorted(set(reference) - items)
            raise CoverageMismatch(f"annotator {name!r} is missing judgments for items {missing[:10]}")
    if not reference:
        raise CoverageMismatch("no annotated items found")

    names = sorted(judgments)
    aligned = {name: [judgments[name][nr] for nr in reference] for name in names}
    matrix = AgreementMatrix.from_judgments([aligned[name] for name in names], categories=(SUFFICIENT, NOT_SUFFICIENT))

    report: dict = {
        "items": len(reference),
        "annotators": names,
        "fleiss_kappa": fleiss_kappa(matrix),
        "cohen_kappa_pairs": {},
        "per_annotator_sufficiency_rate": {
            name: sum(1 for v in aligned[name] if v == SUFFICIENT) / len(reference) for name in names
        },
        "at_least_one_sufficient_rate": sum(
            1 for i in range(len(reference)) if any(aligned[name][i] == SUFFICIENT for name in names)
        )
        / len(reference),
        "unanimity_rate": sum(
            1 for i in range(len(reference)) if len({aligned[name][i] for name in names}) == 1
        )
        / len(reference),
    }
    for i, first in enumerate(names):
        for second in names[i + 1 :]:
            report["cohen_kappa_pairs"][f"{first}/{second}"] = cohen_kappa(aligned[first], aligned[second])

    if llm_rows is not None:
        llm = _judgments_by_item(llm_rows)
        if set(llm) != set(reference):
            raise CoverageMismatch("LLM worksheet does not cover the annotated item set")
        llm_aligned = [llm[nr] for nr in reference]
        for name in names:
            report["cohen_kappa_pairs"][f"{name}/llm"] = cohen_kappa(aligned[name], llm_aligned)
        confusion = {f"{h}|{m}": 0 for h in (SUFFICIENT, NOT_SUFFICIENT) for m in (SUFFICIENT, NOT_SUFFICIENT)}
        ties = 0
        for i in range(len(reference)):
            votes = [aligned[name][i] for name in names]
            sufficient_votes = votes.count(SUFFICIENT)
            if sufficient_votes * 2 == len(votes):
                ties += 1
                continue
            majority = SUFFICIENT if sufficient_votes * 2 > len(votes) else NOT_SUFFICIENT
            confusion[f"{majority}|{llm_aligned[i]}"] += 1
        report["llm_vs_majority_confusion"] = confusion
        report["majority_ties"] = ties
    return report


# House-written reviewer prompt. This is our own instruction text for the
# optional model-assisted sufficiency pass, not one of the four frozen
# stage templates.
_REVIEW_SYSTEM = (
    "You review evidence gathered by a fact-checking system.\n"
    "Given a claim and the evidence found for it, judge whether the evidence is sufficient "
    "to decide the claim either way.\n\n"
    'Answer with exactly one JSON object: {"judgment": "sufficient"} or {"judgment": "not sufficient"}.'
)

_REVIEW_USER = "Claim: {claim}\n\nEvidence found:\n{evidence}\n\nIs this evidence sufficient to decide the claim?"


def _parse_sufficiency(raw: str) -> str:
    text = raw.strip()
    start, end = text.find("{"), text.rfind("}")
    if start != -1 and end > start:
        text = text[start : end + 1]
    try:
        payload = json.loads(text)
        value = str(payload["judgment"]).strip().lower()
    except (ValueError, KeyError, TypeError):
        raise MalformedModelOutput(f"bad sufficiency judgment: {raw[:120]!r}") from None
    if value not in (SUFFICIENT, NOT_SUFFICIENT):
        raise MalformedModelOutput(f"bad sufficiency judgment: {raw[:120]!r}")
    return value


def review_sufficiency(rows: Sequence[AnnotationRow], chat: ChatBackend) -> list[AnnotationRow]:
    """Fill human_annotated on a copy of the rows using a chat model.

    One retry per row on malformed output, mirroring the classifier
    contract; a second failure raises.
    """
    reviewed = []
    for row in rows:
        user_text = _REVIEW_USER.format(claim=row.claim, evidence=row.found_evidence or "(none)")
        judgment: str | None = None
        last: MalformedModelOutput | None = None
        for attempt in range(2):
            raw = chat.complete(_REVIEW_SYSTEM, user_text)
            try:
                judgment = _parse_sufficiency(raw)
                break
            except MalformedModelOutput as exc:
                last = exc
                log.warning("row %d attempt %d: %s", row.nr, attempt + 1, exc)
        if judgment is None:
            assert last is not None
            raise last
        reviewed.append(replace(row, human_annotated=judgment))
    return reviewed
