from __future__ import annotations

import math
import random

import pytest

from scorer_service.backends import (
    BUILTIN_NLI,
    BUILTIN_SCORER,
    HeuristicNliModel,
    ModelLoadError,
    OverlapRelevanceModel,
    _label_permutation,
    load_nli_model,
    load_relevance_model,
)

LABELS = ("entail", "neutral", "contradict")


def argmax_label(row: tuple[float, float, float]) -> str:
    return LABELS[row.index(max(row))]


class TestOverlapModel:
    def test_known_values(self):
        model = OverlapRelevanceModel()
        scores = model.score("Alpha beta gamma.", ["alpha beta", "gamma delta", "nothing here"])
        assert scores == [2 / 3, 1 / 4, 0.0]

    def test_empty_texts_score_zero(self):
        assert OverlapRelevanceModel().score("???", ["!!!"]) == [0.0]

    def test_alignment_and_permutation(self):
        rng = random.Random(404)
        model = OverlapRelevanceModel()
        vocabulary = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta"]
        for _ in range(200):
            claim = " ".join(rng.sample(vocabulary, 3))
            candidates = [" ".join(rng.choices(vocabulary, k=rng.randint(1, 5))) for _ in range(rng.randint(1, 8))]
            scores = model.score(claim, candidates)
            assert len(scores) == len(candidates)
            assert all(math.isfinite(s) for s in scores)

            order = list(range(len(candidates)))
            rng.shuffle(order)
            permuted = model.score(claim, [candidates[i] for i in order])
            assert permuted == [scores[i] for i in order]

    def test_pure_across_instances_and_calls(self):
        claim, candidates = "the quick brown fox", ["quick fox", "lazy dog", "brown cow jumps"]
        first = OverlapRelevanceModel().score(claim, candidates)
        model = OverlapRelevanceModel()
        for _ in range(3):
            assert model.score(claim, candidates) == first


class TestHeuristicNli:
    def test_paraphrase_is_entailment(self):
        rows = HeuristicNliModel().logits(
            [("Alice was born in Canada.", "Alice's birthplace is Canada.")]
        )
        assert argmax_label(rows[0]) == "entail"

    def test_unrelated_is_neutral(self):
        rows = HeuristicNliModel().logits(
            [("Alice was born in Canada.", "The weather is nice today.")]
        )
        assert argmax_label(rows[0]) == "neutral"

    def test_negation_flips_to_contradiction(self):
        rows = HeuristicNliModel().logits(
            [("Alice was born in Canada.", "Alice was not born in Canada.")]
        )
        assert argmax_label(rows[0]) == "contradict"

    def test_alignment_shape_and_determinism(self):
        rng = random.Random(77)
        model = HeuristicNliModel()
        words = ["alice", "bob", "runs", "sleeps", "never", "paris", "home", "today"]
        pairs = [
            (" ".join(rng.choices(words, k=4)), " ".join(rng.choices(words, k=4)))
            for _ in range(50)
        ]
        rows = model.logits(pairs)
        assert len(rows) == len(pairs)
        for row in rows:
            assert len(row) == 3
            assert all(math.isfinite(v) for v in row)
        assert HeuristicNliModel().logits(pairs) == rows


class TestLoaders:
    def test_builtin_dispatch(self):
        assert isinstance(load_relevance_model(BUILTIN_SCORER), OverlapRelevanceModel)
        assert isinstance(load_nli_model(BUILTIN_NLI), HeuristicNliModel)

    def test_unknown_builtin_is_refused(self):
        with pytest.raises(ModelLoadError):
            load_relevance_model("builtin:transformer")
        with pytest.raises(ModelLoadError):
            load_nli_model("builtin:transformer")


class TestLabelPermutation:
    def test_reversed_checkpoint_order(self):
        id2label = {0: "CONTRADICTION", 1: "NEUTRAL", 2: "ENTAILMENT"}
        assert _label_permutation(id2label, "m") == (2, 1, 0)

    def test_native_order_passthrough(self):
        id2label = {0: "entailment", 1: "neutral", 2: "contradiction"}
        assert _label_permutation(id2label, "m") == (0, 1, 2)

    def test_unmappable_labels_fail_loudly(self):
        with pytest.raises(ModelLoadError, match="do not cover"):
            _label_permutation({0: "LABEL_0", 1: "LABEL_1", 2: "LABEL_2"}, "m")
