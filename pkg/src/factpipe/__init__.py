"""factpipe: two-stage fact verification over a knowledge graph with a web-search fallback."""

from .domain import (
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

__all__ = [
    "Claim",
    "Direction",
    "EvidenceItem",
    "EvidenceKind",
    "Label",
    "RdfTerm",
    "Stage",
    "Triple",
    "VerificationResult",
    "Verdict",
    "parse_label",
    "result_from_json",
]

__version__ = "0.1.0"
