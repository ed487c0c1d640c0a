"""Independent reference implementations used to check the real ones.

Everything here runs on exact Fraction arithmetic and is written straight
from the textbook formulas, on purpose sharing no code with the package.
None stands in for an undefined (NaN) coefficient.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Sequence

from factpipe.domain import Label


def metrics_oracle(gold: Sequence[Label], predicted: Sequence[Label], mode: str) -> dict:
    space = [Label.SUPPORTED, Label.REFUTED] if mode == "sr" else [Label.SUPPORTED, Label.REFUTED, Label.NEI]
    present = [label for label in space if label in gold]

    per_class = {}
    for label in present:
        tp = fp = fn = 0
        for g, p in zip(gold, predicted):
            if g == label and p == label:
                tp += 1
            elif g != label and p == label:
                fp += 1
            elif g == label and p != label:
                fn += 1
        precision = Fraction(tp, tp + fp) if tp + fp else Fraction(0)
        recall = Fraction(tp, tp + fn) if tp + fn else Fraction(0)
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else Fraction(0)
        per_class[label] = {"precision": precision, "recall": recall, "f1": f1, "support": tp + fn}

    count = len(present)
    return {
        "accuracy": Fraction(sum(1 for g, p in zip(gold, predicted) if g == p), len(gold)),
        "precision": sum(c["precision"] for c in per_class.values()) / count,
        "recall": sum(c["recall"] for c in per_class.values()) / count,
        "f1": sum(c["f1"] for c in per_class.values()) / count,
        "per_class": per_class,
    }


def fleiss_oracle(matrix: Sequence[Sequence[int]]) -> Fraction | None:
    items = len(matrix)
    raters = sum(matrix[0])
    categories = len(matrix[0])

    total = items * raters
    p_j = [Fraction(sum(row[j] for row in matrix), total) for j in range(categories)]
    p_i = [
        Fraction(sum(count * (count - 1) for count in row), raters * (raters - 1))
        for row in matrix
    ]
    p_bar = sum(p_i) / items
    p_e = sum(p * p for p in p_j)
    if p_e == 1:
        return None
    return (p_bar - p_e) / (1 - p_e)


def cohen_oracle(a: Sequence[Hashable], b: Sequence[Hashable]) -> Fraction | None:
    n = len(a)
    p_o = Fraction(sum(1 for x, y in zip(a, b) if x == y), n)
    categories = set(a) | set(b)
    p_e = sum(
        Fraction(sum(1 for x in a if x == c), n) * Fraction(sum(1 for y in b if y == c), n)
        for c in categories
    )
    if p_e == 1:
        return None
    return (p_o - p_e) / (1 - p_e)
