"""Template fidelity: pinned checksums and byte-stable rendering."""

from __future__ import annotations

import hashlib
from importlib import resources

import pytest

from factpipe.prompts import STAGES, format_evidence_list, load_template, render

# Frozen template bytes. A mismatch means the prompt text changed, which is
# an intentional, reviewed event or a bug; either way the suite must shout.
TEMPLATE_SHA256 = {
    "kg_system.txt": "46ee15d4113c5a34c0aeaf94330b48cc9801724214f11cfd7bd226f974bd576a",
    "kg_user.txt": "8086b4d51051961120b10a1158faa38344885cb9d9c632ea341520af18cce8c0",
    "web_system.txt": "2b19094f4e1a2aee54150436649bcefe79998fd3b9747a6933c9ac0a1fd800f7",
    "web_user.txt": "379f29beb0ba7ed59c4755880c2261e0b9c0e62618ce3402ed659959a1619e49",
    "zero_shot_system.txt": "afcc1b1fd4c65fda3388c91a98ce95732ebc1fa0509386cb71cd06836cf8a1a3",
    "zero_shot_user.txt": "8ae6b0865f1578b0b5dd27a8bd69eed8cf1cffaaadb07cce1c471c8c779a2808",
    "rewrite_system.txt": "af36808ec979ca51b2f0898be911841f7cf09789a93e45b88d706dd0c72b27a1",
    "rewrite_user.txt": "9911619e92d5b14b2929ab06cca0a2da569f3c0e7a253cb54aa0ee4a1c8e1fe2",
}


@pytest.mark.parametrize("name,expected", sorted(TEMPLATE_SHA256.items()))
def test_template_checksums(name, expected):
    data = resources.files("factpipe.prompts").joinpath("templates", name).read_bytes()
    assert hashlib.sha256(data).hexdigest() == expected, f"{name} drifted from its pinned bytes"


def test_every_stage_loads():
    for stage in STAGES:
        template = load_template(stage)
        assert template.system_text
        assert "<CLAIM>" in template.user_text


def test_kg_template_structure():
    template = load_template("kg")
    assert template.system_text.startswith("You are a world-class fact-verification assistant.")
    assert '"label": <Supported|Refuted|Not Enough Info>' in template.system_text
    assert "<EVIDENCE_PATHS>" in template.user_text
    # Three worked examples, one per label.
    assert "1) Supported" in template.user_text
    assert "2) Refuted" in template.user_text
    assert "3) Not Enough Info" in template.user_text


def test_web_template_is_binary():
    template = load_template("web")
    assert '"label": <Supported|Refuted>' in template.system_text
    assert "Not Enough Info" not in template.system_text
    assert "<EVIDENCE_SNIPPETS>" in template.user_text


def test_rewrite_template_mentions_query_rules():
    template = load_template("rewrite")
    assert "3–5" in template.system_text
    assert "under 12 words" in template.system_text
    assert '{"queries": [ ... ]}' in template.system_text


def test_render_kg_is_exact_substitution():
    template = load_template("kg")
    system_text, user_text = render(template, "Venus is a planet.", ["Venus -> type -> Planet", "Venus -> mass -> 4.8"])
    assert system_text == template.system_text
    expected_user = template.user_text.replace("<CLAIM>", "Venus is a planet.").replace(
        "<EVIDENCE_PATHS>", "1. Venus -> type -> Planet\n2. Venus -> mass -> 4.8"
    )
    assert user_text == expected_user
    assert "<CLAIM>" not in user_text
    assert "<EVIDENCE_PATHS>" not in user_text


def test_render_is_deterministic():
    template = load_template("web")
    first = render(template, "Claim text.", ["snippet one", "snippet two"])
    second = render(template, "Claim text.", ["snippet one", "snippet two"])
    assert first == second
    assert first[1].encode("utf-8") == second[1].encode("utf-8")


def test_render_does_not_normalize_inputs():
    template = load_template("zero_shot")
    weird = 'Claim with  "quotes" and\ttabs'
    _, user_text = render(template, weird)
    assert weird in user_text


def test_evidence_list_formatting():
    assert format_evidence_list(["a", "b", "c"]) == "1. a\n2. b\n3. c"
    with pytest.raises(ValueError):
        format_evidence_list([])


def test_render_rejects_wrong_evidence_arity():
    with pytest.raises(ValueError):
        render(load_template("kg"), "x")
    with pytest.raises(ValueError):
        render(load_template("zero_shot"), "x", ["evidence"])


def test_unknown_stage_rejected():
    with pytest.raises(ValueError):
        load_template("galaxy")
