from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from factpipe.domain import (
    Claim,
    Direction,
    EvidenceItem,
    EvidenceKind,
    Label,
    RdfTerm,
    Stage,
    Triple,
    VerificationResult,
    Verdict,
    parse_label,
    result_from_json,
)
from factpipe.errors import UnknownLabel


class TestParseLabel:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("Supported", Label.SUPPORTED),
            ("SUPPORTS", Label.SUPPORTED),
            ("supports", Label.SUPPORTED),
            ("Refuted", Label.REFUTED),
            ("REFUTES", Label.REFUTED),
            ("Not Enough Info", Label.NEI),
            ("NOT ENOUGH INFO", Label.NEI),
            ("NOT_ENOUGH_INFO", Label.NEI),
            ("nei", Label.NEI),
            ("  Supported  ", Label.SUPPORTED),
        ],
    )
    def test_accepted_spellings(self, raw, expected):
        assert parse_label(raw) is expected

    @pytest.mark.parametrize("raw", ["maybe", "true", "SUPPORT", "refutedd", "None"])
    def test_rejects_unknown(self, raw):
        with pytest.raises(UnknownLabel):
            parse_label(raw)

    def test_rejects_empty(self):
        with pytest.raises(UnknownLabel):
            parse_label("   ")

    @given(st.sampled_from(list(Label)))
    def test_round_trip(self, label):
        assert parse_label(label.serialize()) is label
        assert parse_label(label.serialize().upper()) is label
        assert parse_label(label.serialize().lower()) is label


class TestClaim:
    def test_holds_fields(self):
        claim = Claim(id="c1", text="Venus is a planet.", gold_label=Label.SUPPORTED)
        assert claim.gold_label is Label.SUPPORTED

    @pytest.mark.parametrize("text", ["", "   "])
    def test_rejects_empty_text(self, text):
        with pytest.raises(ValueError):
            Claim(id="c1", text=text)

    def test_rejects_empty_id(self):
        with pytest.raises(ValueError):
            Claim(id="", text="x")


class TestTriple:
    def test_literal_object_keeps_annotations(self):
        term = RdfTerm(value="1889", is_literal=True, datatype="http://www.w3.org/2001/XMLSchema#gYear")
        triple = Triple("http://ex.org/a", "http://ex.org/founded", term, Direction.ENTITY_AS_SUBJECT)
        assert triple.object.datatype.endswith("gYear")

    def test_iri_object_rejects_lang(self):
        with pytest.raises(ValueError):
            RdfTerm(value="http://ex.org/x", is_literal=False, lang="en")

    @pytest.mark.parametrize("subject", ["not an iri", "", "no-scheme/path"])
    def test_rejects_non_iri_subject(self, subject):
        with pytest.raises(ValueError):
            Triple(subject, "http://ex.org/p", RdfTerm(value="x", is_literal=True), Direction.ENTITY_AS_SUBJECT)


class TestEvidenceItem:
    def test_kg_item_requires_triple_provenance(self):
        with pytest.raises(ValueError):
            EvidenceItem(text="a -> b -> c", kind=EvidenceKind.KG_TRIPLE, source="http://ex.org")

    def test_web_item_requires_url(self):
        with pytest.raises(ValueError):
            EvidenceItem(text="snippet", kind=EvidenceKind.WEB_SNIPPET, source={"subject": "s"})

    def test_rejects_non_finite_score(self):
        with pytest.raises(ValueError):
            EvidenceItem(text="snippet", kind=EvidenceKind.WEB_SNIPPET, source="http://ex.org", score=float("nan"))


class TestVerdict:
    def test_nei_may_omit_reason(self):
        assert Verdict(label=Label.NEI, reason="").label is Label.NEI

    @pytest.mark.parametrize("label", [Label.SUPPORTED, Label.REFUTED])
    def test_decisive_requires_reason(self, label):
        with pytest.raises(ValueError):
            Verdict(label=label, reason="  ")


def _result(stage: Stage, fallback_used: bool) -> VerificationResult:
    verdict = Verdict(label=Label.SUPPORTED, reason="Path 1 matches.", cited_evidence=(0,))
    item = EvidenceItem(
        text="A -> b -> C",
        kind=EvidenceKind.KG_TRIPLE,
        source={"subject": "http://ex.org/A", "predicate": "http://ex.org/b", "object": "http://ex.org/C"},
        score=0.5,
    )
    return VerificationResult(
        claim_id="c1",
        final_label=Label.SUPPORTED,
        stage=stage,
        evidence=(item,),
        verdict=verdict,
        fallback_used=fallback_used,
        latency_ms={"kg": 1.5},
    )


class TestVerificationResult:
    def test_fallback_flag_must_match_stage(self):
        with pytest.raises(ValueError):
            _result(Stage.KG, fallback_used=True)
        with pytest.raises(ValueError):
            _result(Stage.WEB, fallback_used=False)

    def test_json_round_trip(self):
        result = _result(Stage.KG, fallback_used=False)
        payload = result.to_json_dict()
        assert payload["final_label"] == "Supported"
        assert payload["stage"] == "kg"
        assert result_from_json(payload) == result

    def test_json_round_trip_web(self):
        verdict = Verdict(label=Label.REFUTED, reason="Snippet 1 contradicts.", cited_evidence=(0,))
        item = EvidenceItem(text="snippet text", kind=EvidenceKind.WEB_SNIPPET, source="http://ex.org/page", score=0.9)
        result = VerificationResult(
            claim_id="c2",
            final_label=Label.REFUTED,
            stage=Stage.WEB,
            evidence=(item,),
            verdict=verdict,
            fallback_used=True,
        )
        assert result_from_json(result.to_json_dict()) == result
