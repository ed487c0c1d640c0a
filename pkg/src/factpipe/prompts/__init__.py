"""Prompt templates and their rendering.

Templates live as plain-text files next to this module and are treated as
frozen artifacts: rendering is pure placeholder substitution, so the same
inputs always produce byte-identical prompts. Checksums over the template
files are pinned in the test suite; edit a template and the suite will say
so out loud.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

CLAIM_PLACEHOLDER = "<CLAIM>"

# Stage name -> placeholder the user template carries for the evidence list,
# or None when the stage takes no evidence.
_EVIDENCE_PLACEHOLDERS: dict[str, str | None] = {
    "kg": "<EVIDENCE_PATHS>",
    "web": "<EVIDENCE_SNIPPETS>",
    "zero_shot": None,
    "rewrite": None,
}

STAGES = tuple(_EVIDENCE_PLACEHOLDERS)


@dataclass(frozen=True)
class PromptTemplate:
    """System/user template pair for one model call kind."""

    stage: str
    system_text: str
    user_text: str

    @property
    def evidence_placeholder(self) -> str | None:
        return _EVIDENCE_PLACEHOLDERS[self.stage]


def _read_template_file(name: str) -> str:
    data = resources.files(__package__).joinpath("templates", name).read_bytes()
    text = data.decode("utf-8")
    # Template files end with one editor-friendly trailing newline that is
    # not part of the prompt itself.
    return text[:-1] if text.endswith("\n") else text


@lru_cache(maxsize=None)
def load_template(stage: str) -> PromptTemplate:
    """Load the template pair for a stage: kg, web, zero_shot, or rewrite."""
    if stage not in _EVIDENCE_PLACEHOLDERS:
        raise ValueError(f"unknown prompt stage: {stage!r}")
    return PromptTemplate(
        stage=stage,
        system_text=_read_template_file(f"{stage}_system.txt"),
        user_text=_read_template_file(f"{stage}_user.txt"),
    )


def format_evidence_list(texts: list[str]) -> str:
    """Number evidence texts 1..n, one per line, in the given order."""
    if not texts:
        raise ValueError("evidence list must be non-empty")
    return "\n".join(f"{i}. {text}" for i, text in enumerate(texts, start=1))


def render(template: PromptTemplate, claim_text: str, evidence_texts: list[str] | None = None) -> tuple[str, str]:
    """Render (system, user) prompts by literal placeholder substitution.

    Stages with an evidence placeholder require evidence_texts; the others
    reject it. No escaping or normalization happens here on purpose.
    """
    placeholder = template.evidence_placeholder
    user = template.user_text.replace(CLAIM_PLACEHOLDER, claim_text)
    if placeholder is None:
        if evidence_texts is not None:
            raise ValueError(f"stage {template.stage!r} takes no evidence list")
        return template.system_text, user
    if evidence_texts is None:
        raise ValueError(f"stage {template.stage!r} requires an evidence list")
    return template.system_text, user.replace(placeholder, format_evidence_list(evidence_texts))
