"""Exception types raised across the pipeline.

Backend-facing errors are RuntimeErrors so callers can distinguish
"the world misbehaved" from programming errors; input validation
problems stay ValueErrors.
"""

from __future__ import annotations


class UnknownLabel(ValueError):
    """Label string outside the accepted spellings."""


class LinkerUnavailable(RuntimeError):
    """Every configured entity linker was unreachable (distinct from an empty result)."""


class EndpointError(RuntimeError):
    """SPARQL endpoint unreachable, timed out, or answered with an HTTP error."""


class MalformedResponse(RuntimeError):
    """SPARQL endpoint answered, but not with parseable results JSON."""


class ScorerUnavailable(RuntimeError):
    """Relevance scorer backend unreachable or broke its response contract."""


class NliBackendUnavailable(RuntimeError):
    """NLI backend unreachable or broke its response contract."""


class ChatBackendUnavailable(RuntimeError):
    """Chat completion backend unreachable or answered with an HTTP error."""


class MalformedModelOutput(RuntimeError):
    """Model output could not be parsed into the expected JSON contract."""


class SearchBackendUnavailable(RuntimeError):
    """Web search backend unreachable or answered with an HTTP error."""


class QuotaExceeded(RuntimeError):
    """Web search backend rejected the request for quota reasons."""


class FormatError(ValueError):
    """Dataset file failed ingestion; carries one entry per offending line."""

    def __init__(self, problems: list[tuple[int, str]]):
        self.problems = list(problems)
        lines = "; ".join(f"line {n}: {msg}" for n, msg in self.problems)
        super().__init__(f"{len(self.problems)} malformed record(s): {lines}")


class LengthMismatch(ValueError):
    """Paired sequences (gold/predicted, rater/rater) differ in length."""


class MalformedMatrix(ValueError):
    """Agreement matrix rows are inconsistent with the rater count."""


class CoverageMismatch(ValueError):
    """Annotators do not cover the same item set."""


class InsufficientPool(Warning):
    """Sampling pool smaller than the requested sample size."""


class PipelineError(RuntimeError):
    """Verification could not produce a result; carries stage diagnostics."""

    def __init__(self, message: str, diagnostics: list[str] | None = None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])


class BudgetExceeded(PipelineError):
    """Per-claim wall-clock budget ran out before a verdict."""
