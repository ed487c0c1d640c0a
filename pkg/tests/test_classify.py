from __future__ import annotations

import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from factpipe.classify import (
    NliClass,
    NliJudgment,
    NliLogits,
    classify_llm,
    classify_nli,
    classify_zero_shot,
    extract_citations,
    map_nli_label,
    parse_verdict_json,
    softmax,
)
from factpipe.domain import Claim, EvidenceItem, EvidenceKind, Label
from factpipe.errors import MalformedModelOutput
from helpers import ScriptedChat, TableNli, static_chat

CLAIM = Claim(id="c1", text="Venus is the second planet from the Sun.")

finite_logit = st.floats(min_value=-50, max_value=50, allow_nan=False, allow_infinity=False)


def _kg_item(text: str) -> EvidenceItem:
    return EvidenceItem(
        text=text,
        kind=EvidenceKind.KG_TRIPLE,
        source={"subject": "http://ex.org/s", "predicate": "http://ex.org/p", "object": "http://ex.org/o"},
    )


def _web_item(text: str, url: str = "http://ex.org/page") -> EvidenceItem:
    return EvidenceItem(text=text, kind=EvidenceKind.WEB_SNIPPET, source=url)


class TestSoftmax:
    @given(finite_logit, finite_logit, finite_logit)
    def test_matches_direct_definition(self, e, n, c):
        probs = softmax(NliLogits(e, n, c))
        # Independent oracle: unstabilized definition over small inputs.
        denominator = math.exp(e) + math.exp(n) + math.exp(c)
        expected = (math.exp(e) / denominator, math.exp(n) / denominator, math.exp(c) / denominator)
        for got, want in zip(probs, expected):
            assert got == pytest.approx(want, abs=1e-12)
        assert sum(probs) == pytest.approx(1.0, abs=1e-12)

    def test_survives_extreme_logits(self):
        probs = softmax(NliLogits(1000.0, 0.0, -1000.0))
        assert probs[0] == pytest.approx(1.0)
        assert all(math.isfinite(p) for p in probs)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            NliLogits(float("inf"), 0.0, 0.0)


class TestNliMapping:
    def test_fixed_mapping(self):
        assert map_nli_label(NliClass.ENTAILMENT) is Label.SUPPORTED
        assert map_nli_label(NliClass.NEUTRAL) is Label.NEI
        assert map_nli_label(NliClass.CONTRADICTION) is Label.REFUTED

    @given(finite_logit, finite_logit, finite_logit)
    def test_judgment_label_tracks_argmax(self, e, n, c):
        judgment = NliJudgment.from_logits(NliLogits(e, n, c))
        values = (e, n, c)
        winner = NliClass(values.index(max(values)))
        assert judgment.label is map_nli_label(winner)
        assert judgment.p_max == pytest.approx(max(judgment.probs))


class TestClassifyNli:
    def test_premise_is_evidence_hypothesis_is_claim(self):
        seen = {}

        class Probe:
            def judge(self, pairs):
                seen["pairs"] = pairs
                return [NliLogits(5.0, 0.0, 0.0) for _ in pairs]

        classify_nli(CLAIM, [_kg_item("Venus -> order -> second")], Probe())
        assert seen["pairs"] == [("Venus -> order -> second", CLAIM.text)]

    def test_highest_pmax_among_decisive_wins(self):
        backend = TableNli(
            {
                ("e1", CLAIM.text): NliLogits(2.0, 0.0, 0.0),  # entail, weaker
                ("e2", CLAIM.text): NliLogits(0.0, 0.0, 6.0),  # contradict, stronger
            }
        )
        verdict = classify_nli(CLAIM, [_kg_item("e1"), _kg_item("e2")], backend)
        assert verdict.label is Label.REFUTED
        assert verdict.cited_evidence == (1,)
        assert "Evidence 2" in verdict.reason

    def test_exact_tie_prefers_refuted(self):
        # Logits far enough apart that both p_max values saturate to exactly 1.0.
        backend = TableNli(
            {
                ("e1", CLAIM.text): NliLogits(50.0, 0.0, 0.0),
                ("e2", CLAIM.text): NliLogits(0.0, 0.0, 50.0),
            }
        )
        verdict = classify_nli(CLAIM, [_kg_item("e1"), _kg_item("e2")], backend)
        assert verdict.label is Label.REFUTED
        assert verdict.cited_evidence == (1,)

    def test_tie_within_label_prefers_lower_index(self):
        backend = TableNli(
            {
                ("e1", CLAIM.text): NliLogits(7.0, 0.0, 1.0),
                ("e2", CLAIM.text): NliLogits(7.0, 0.0, 1.0),
            }
        )
        verdict = classify_nli(CLAIM, [_kg_item("e1"), _kg_item("e2")], backend)
        assert verdict.cited_evidence == (0,)

    def test_all_neutral_is_nei(self):
        backend = TableNli(default=NliLogits(0.0, 9.0, 0.0))
        verdict = classify_nli(CLAIM, [_kg_item("e1"), _kg_item("e2")], backend)
        assert verdict.label is Label.NEI
        assert verdict.cited_evidence == ()

    def test_rejects_empty_evidence(self):
        with pytest.raises(ValueError):
            classify_nli(CLAIM, [], TableNli())

    def test_rejects_misaligned_backend(self):
        class Broken:
            def judge(self, pairs):
                return [NliLogits(1.0, 0.0, 0.0)]

        with pytest.raises(ValueError):
            classify_nli(CLAIM, [_kg_item("e1"), _kg_item("e2")], Broken())


class TestParseVerdictJson:
    PERMITTED = frozenset({Label.SUPPORTED, Label.REFUTED, Label.NEI})

    def test_clean_object(self):
        label, reason = parse_verdict_json('{"label": "Supported", "reason": "Path 1 matches."}', self.PERMITTED)
        assert label is Label.SUPPORTED
        assert reason == "Path 1 matches."

    def test_fever_spelling_accepted(self):
        label, _ = parse_verdict_json('{"label": "REFUTES", "reason": "Path 2."}', self.PERMITTED)
        assert label is Label.REFUTED

    def test_object_embedded_in_prose(self):
        raw = 'Sure! Here is the answer:\n```json\n{"label": "Refuted", "reason": "Path 1."}\n```'
        label, _ = parse_verdict_json(raw, self.PERMITTED)
        assert label is Label.REFUTED

    @pytest.mark.parametrize(
        "raw",
        [
            "not json at all",
            '{"label": "Supported"}',
            '{"reason": "no label"}',
            '{"label": 3, "reason": "x"}',
            '{"label": "perhaps", "reason": "x"}',
            "[1, 2, 3]",
        ],
    )
    def test_malformed_rejected(self, raw):
        with pytest.raises(MalformedModelOutput):
            parse_verdict_json(raw, self.PERMITTED)

    def test_label_outside_permitted_set(self):
        binary = frozenset({Label.SUPPORTED, Label.REFUTED})
        with pytest.raises(MalformedModelOutput):
            parse_verdict_json('{"label": "Not Enough Info", "reason": "x"}', binary)


class TestExtractCitations:
    @pytest.mark.parametrize(
        "reason,expected",
        [
            ("Path 1 exactly matches birthPlace.", (0,)),
            ("Snippet 2 indicates the opposite.", (1,)),
            ("Paths 1 and 3 agree.", (0, 2)),
            ("Snippets 2, 3 and 4 all confirm it.", (1, 2, 3)),
            ("Evidence 1 is decisive.", (0,)),
            ("No relevant information found.", ()),
            ("Path 9 does not exist here.", ()),
        ],
    )
    def test_cases(self, reason, expected):
        assert extract_citations(reason, 4) == expected


class TestClassifyLlm:
    def test_renders_stage_prompt_and_parses(self):
        chat = static_chat('{"label": "Supported", "reason": "Path 1 exactly matches."}')
        verdict = classify_llm(CLAIM, [_kg_item("Venus -> order -> second")], "kg", chat)
        assert verdict.label is Label.SUPPORTED
        assert verdict.cited_evidence == (0,)
        system_text, user_text = chat.calls[0]
        assert "evidence paths" in system_text
        assert "1. Venus -> order -> second" in user_text
        assert CLAIM.text in user_text

    def test_web_stage_refuses_nei(self):
        chat = static_chat('{"label": "Not Enough Info", "reason": "unclear"}')
        with pytest.raises(MalformedModelOutput):
            classify_llm(CLAIM, [_web_item("snippet")], "web", chat)
        # Retried once with the identical prompt before surfacing.
        assert len(chat.calls) == 2
        assert chat.calls[0] == chat.calls[1]

    def test_retry_recovers_from_one_bad_answer(self):
        answers = iter(["garbage", '{"label": "Refuted", "reason": "Snippet 1 contradicts."}'])
        chat = ScriptedChat(lambda s, u: next(answers))
        verdict = classify_llm(CLAIM, [_web_item("snippet")], "web", chat)
        assert verdict.label is Label.REFUTED
        assert len(chat.calls) == 2

    def test_persistent_garbage_surfaces_after_one_retry(self):
        chat = static_chat("{broken")
        with pytest.raises(MalformedModelOutput):
            classify_llm(CLAIM, [_kg_item("e")], "kg", chat)
        assert len(chat.calls) == 2

    def test_rejects_unknown_stage(self):
        with pytest.raises(ValueError):
            classify_llm(CLAIM, [_kg_item("e")], "zero_shot", static_chat("{}"))

    def test_rejects_empty_evidence(self):
        with pytest.raises(ValueError):
            classify_llm(CLAIM, [], "kg", static_chat("{}"))


class TestClassifyZeroShot:
    def test_binary_output(self):
        chat = static_chat('{"label": "Supported", "reason": "Commonly known."}')
        verdict = classify_zero_shot(CLAIM, chat)
        assert verdict.label is Label.SUPPORTED
        assert verdict.cited_evidence == ()
        _, user_text = chat.calls[0]
        assert user_text.startswith(f"Claim: {CLAIM.text}")

    def test_nei_not_permitted(self):
        chat = static_chat('{"label": "Not Enough Info", "reason": "unsure"}')
        with pytest.raises(MalformedModelOutput):
            classify_zero_shot(CLAIM, chat)
