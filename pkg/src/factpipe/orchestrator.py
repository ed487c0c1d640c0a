"""Two-stage orchestration: KG first, web fallback on NEI.

The KG stage links entities, pulls their one-hop neighborhoods, ranks the
verbalized triples, and classifies. If it cannot decide (NEI, nothing
linked, nothing retrieved, or a backend died), the web stage takes over
exactly once. The web stage's answer is final either way.
"""

from __future__ import annotations

import logging
import time
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from .backends.chat import ChatBackend, FixtureChatBackend, HttpChatBackend
from .backends.nli import FixtureNliBackend, RemoteNliBackend
from .backends.scorer import FixtureRelevanceScorer, RemoteRelevanceScorer
from .backends.search import FixtureSearchBackend, ProgrammableSearchClient
from .backends.sparql import HttpSparqlTransport, RecordedSparqlTransport, SparqlTransport
from .classify import NliBackend, classify_llm, classify_nli
from .domain import Claim, EvidenceItem, Label, Stage, Verdict, VerificationResult
from .entity_linking import DictionaryLinker, HttpLinker, Linker, resolve_entities
from .errors import (
    BudgetExceeded,
    ChatBackendUnavailable,
    EndpointError,
    LinkerUnavailable,
    MalformedModelOutput,
    MalformedResponse,
    NliBackendUnavailable,
    PipelineError,
    QuotaExceeded,
    ScorerUnavailable,
    SearchBackendUnavailable,
)
from .kg_retrieval import (
    TRIPLE_CAP,
    PredicateBlacklist,
    SparqlTripleSource,
    TripleSource,
    filter_meta_predicates,
    retrieve_one_hop,
)
from .ranking import (
    LEXICAL_SCORER,
    REMOTE_SCORER,
    LexicalOverlapScorer,
    ScorerBackend,
    evidence_from_triple,
    score_candidates,
    select_top_k,
)
from .web_fallback import DEFAULT_N_MAX, run_fallback

log = logging.getLogger(__name__)

MODE_FULL = "full"
MODE_KG_ONLY = "kg_only"
MODE_WEB_ONLY = "web_only"

LLM_CLASSIFIER = "llm"
NLI_CLASSIFIER = "nli"

# Anything a stage-1 backend can throw that should degrade to NEI rather
# than kill the claim; the fallback still gets its chance.
_STAGE1_ERRORS = (
    LinkerUnavailable,
    EndpointError,
    MalformedResponse,
    ScorerUnavailable,
    ChatBackendUnavailable,
    NliBackendUnavailable,
    MalformedModelOutput,
)

_STAGE2_ERRORS = _STAGE1_ERRORS + (SearchBackendUnavailable, QuotaExceeded)


@dataclass(frozen=True)
class BackendEndpoints:
    """Where the remote backends live. Secrets stay out of this object."""

    sparql_endpoint: str = "https://dbpedia.org/sparql"
    primary_linker_url: str | None = None
    fallback_linker_url: str | None = None
    linker_dictionary: str | None = None
    chat_api_url: str = "https://api.openai.com/v1"
    chat_model: str = "gpt-4.1-mini"
    scorer_url: str | None = None
    nli_url: str | None = None


@dataclass(frozen=True)
class PipelineConfig:
    mode: str = MODE_FULL
    kg_classifier: str = LLM_CLASSIFIER
    web_classifier: str = LLM_CLASSIFIER
    scorer_backend: str = LEXICAL_SCORER
    k: int = 5
    n_max: int = DEFAULT_N_MAX
    triple_cap: int = TRIPLE_CAP
    budget_seconds: float = 60.0
    fixture_dir: str | None = None
    endpoints: BackendEndpoints = field(default_factory=BackendEndpoints)
    # Secrets arrive from the environment only and never get serialized.
    chat_api_key: str | None = field(default=None, repr=False)
    search_api_key: str | None = field(default=None, repr=False)
    search_engine_id: str | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.mode not in (MODE_FULL, MODE_KG_ONLY, MODE_WEB_ONLY):
            raise ValueError(f"unknown pipeline mode: {self.mode!r}")
        for name in (self.kg_classifier, self.web_classifier):
            if name not in (LLM_CLASSIFIER, NLI_CLASSIFIER):
                raise ValueError(f"unknown classifier: {name!r}")
        if self.scorer_backend not in (LEXICAL_SCORER, REMOTE_SCORER):
            raise ValueError(f"unknown scorer backend: {self.scorer_backend!r}")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        if self.triple_cap < 1:
            raise ValueError("triple_cap must be at least 1")
        if self.budget_seconds <= 0:
            raise ValueError("budget_seconds must be positive")


# Per-request override surface: runtime knobs only, never backend wiring.
OVERRIDABLE_OPTIONS = frozenset({"mode", "kg_classifier", "web_classifier", "k", "n_max"})


class _Unconfigured:
    """Stand-in for any backend that was never configured; every use raises."""

    def __init__(self, exc_type: type[Exception], what: str):
        self._exc_type = exc_type
        self._what = what

    def _refuse(self):
        raise self._exc_type(f"{self._what} is not configured")

    def link(self, text):
        self._refuse()

    def complete(self, system_text, user_text):
        self._refuse()

    def search(self, query, limit):
        self._refuse()

    def score(self, claim_text, candidate_texts):
        self._refuse()

    def judge(self, pairs):
        self._refuse()

    def execute(self, query):
        self._refuse()

    def one_hop(self, entity_iri):
        self._refuse()


@dataclass(frozen=True)
class _KgStageOutcome:
    verdict: Verdict | None  # None: the stage never reached classification
    evidence: tuple[EvidenceItem, ...]
    note: str | None


class Pipeline:
    """A wired verification pipeline. Build one per configuration and reuse it."""

    def __init__(
        self,
        config: PipelineConfig,
        *,
        linker_primary: Linker,
        linker_fallback: Linker | None,
        sparql: SparqlTransport,
        triple_source: TripleSource,
        blacklist: PredicateBlacklist,
        scorer: ScorerBackend,
        chat: ChatBackend,
        nli: NliBackend,
        search,
    ):
        self.config = config
        self._linker_primary = linker_primary
        self._linker_fallback = linker_fallback
        self._sparql = sparql
        self._triple_source = triple_source
        self._blacklist = blacklist
        self._scorer = scorer
        self._chat = chat
        self._nli = nli
        self._search = search
        # Stage counters; tests assert the at-most-one-fallback contract on these.
        self.counters: Counter[str] = Counter()

    @property
    def chat_backend(self) -> ChatBackend:
        """The wired chat backend, for callers running prompts outside the pipeline."""
        return self._chat

    def verify(self, claim: Claim, overrides: dict[str, Any] | None = None) -> VerificationResult:
        """Verify one claim end to end.

        overrides may adjust runtime knobs (OVERRIDABLE_OPTIONS) for this
        call only. Raises PipelineError when no stage could produce a
        verdict, BudgetExceeded when the wall clock ran out first.
        """
        config = self._apply_overrides(overrides)
        self.counters["claims"] += 1
        started = time.monotonic()
        deadline = started + config.budget_seconds
        latency_ms: dict[str, float] = {}
        diagnostics: list[str] = []

        kg_outcome: _KgStageOutcome | None = None
        if config.mode in (MODE_FULL, MODE_KG_ONLY):
            stage_start = time.monotonic()
            self.counters["kg_stage_runs"] += 1
            try:
                kg_outcome = self._kg_stage(claim, config)
            except _STAGE1_ERRORS as exc:
                self.counters["kg_stage_failures"] += 1
                note = f"kg stage failed, degrading to Not Enough Info: {exc}"
                log.warning("%s: %s", claim.id, note)
                diagnostics.append(note)
                kg_outcome = _KgStageOutcome(verdict=None, evidence=(), note=note)
            latency_ms["kg"] = (time.monotonic() - stage_start) * 1000.0
            if kg_outcome.note and kg_outcome.note not in diagnostics:
                diagnostics.append(kg_outcome.note)

            decisive = kg_outcome.verdict is not None and kg_outcome.verdict.label is not Label.NEI
            if decisive or config.mode == MODE_KG_ONLY:
                return self._finish_kg(claim, config, kg_outcome, latency_ms, started)

        if time.monotonic() > deadline:
            raise BudgetExceeded(
                f"budget of {config.budget_seconds:.1f}s exhausted before the web stage", diagnostics
            )

        return self._web_stage(claim, config, diagnostics, latency_ms, started)

    # -- stage 1 -------------------------------------------------------------

    def _kg_stage(self, claim: Claim, config: PipelineConfig) -> _KgStageOutcome:
        entities = resolve_entities(claim, self._linker_primary, self._linker_fallback, self._sparql)
        iris: list[str] = []
        for entity in entities:
            if entity.dbpedia_iri and entity.dbpedia_iri not in iris:
                iris.append(entity.dbpedia_iri)
        if not iris:
            return _KgStageOutcome(verdict=None, evidence=(), note="no entities resolved to DBpedia IRIs")

        candidates: list[EvidenceItem] = []
        seen_texts: set[str] = set()
        for iri in iris:
            triples = retrieve_one_hop(iri, self._triple_source, cap=config.triple_cap)
            for triple in filter_meta_predicates(triples, self._blacklist):
                item = evidence_from_triple(triple)
                if item.text in seen_texts:
                    continue
                seen_texts.add(item.text)
                candidates.append(item)
        if not candidates:
            return _KgStageOutcome(verdict=None, evidence=(), note="no usable triples after filtering")

        top = select_top_k(score_candidates(claim.text, candidates, self._scorer), config.k)
        if config.kg_classifier == NLI_CLASSIFIER:
            verdict = classify_nli(claim, top, self._nli)
        else:
            verdict = classify_llm(claim, top, "kg", self._chat)
        return _KgStageOutcome(verdict=verdict, evidence=tuple(top), note=None)

    def _finish_kg(
        self,
        claim: Claim,
        config: PipelineConfig,
        outcome: _KgStageOutcome,
        latency_ms: dict[str, float],
        started: float,
    ) -> VerificationResult:
        if outcome.verdict is None:
            # kg_only mode and nothing reached classification.
            verdict = Verdict(label=Label.NEI, reason=outcome.note or "", cited_evidence=())
            stage, evidence = Stage.NONE, ()
        else:
            verdict, stage, evidence = outcome.verdict, Stage.KG, outcome.evidence
            if verdict.label is not Label.NEI:
                self.counters["kg_decisive"] += 1
        latency_ms["total"] = (time.monotonic() - started) * 1000.0
        return VerificationResult(
            claim_id=claim.id,
            final_label=verdict.label,
            stage=stage,
            evidence=tuple(evidence),
            verdict=verdict,
            fallback_used=False,
            latency_ms=latency_ms,
        )

    # -- stage 2 -------------------------------------------------------------

    def _web_stage(
        self,
        claim: Claim,
        config: PipelineConfig,
        diagnostics: list[str],
        latency_ms: dict[str, float],
        started: float,
    ) -> VerificationResult:
        stage_start = time.monotonic()
        self.counters["web_stage_runs"] += 1
        try:
            outcome = run_fallback(
                claim,
                chat=self._chat,
                search=self._search,
                scorer=self._scorer,
                nli=self._nli if config.web_classifier == NLI_CLASSIFIER else None,
                classifier=config.web_classifier,
                k=config.k,
                n_max=config.n_max,
            )
        except _STAGE2_ERRORS as exc:
            diagnostics.append(f"web stage failed: {exc}")
            raise PipelineError(f"no stage could produce a verdict for claim {claim.id}", diagnostics) from exc
        latency_ms["web"] = (time.monotonic() - stage_start) * 1000.0
        latency_ms["total"] = (time.monotonic() - started) * 1000.0
        log.info(
            "%s: web stage used %d queries, %d snippets retrieved",
            claim.id,
            len(outcome.queries),
            outcome.snippets_retrieved,
        )
        return VerificationResult(
            claim_id=claim.id,
            final_label=outcome.verdict.label,
            stage=Stage.WEB,
            evidence=outcome.evidence,
            verdict=outcome.verdict,
            fallback_used=True,
            latency_ms=latency_ms,
        )

    def _apply_overrides(self, overrides: dict[str, Any] | None) -> PipelineConfig:
        if not overrides:
            return self.config
        unknown = set(overrides) - OVERRIDABLE_OPTIONS
        if unknown:
            raise ValueError(f"options not overridable per request: {sorted(unknown)}")
        return replace(self.config, **overrides)


def build_pipeline(config: PipelineConfig) -> Pipeline:
    """Wire backends for the given configuration.

    fixture_dir switches every backend to recorded replay. Missing live
    configuration wires a stand-in that raises the backend's usual error on
    first use, so a partially configured pipeline degrades exactly like a
    partially available one.
    """
    ep = config.endpoints
    if config.fixture_dir:
        root = Path(config.fixture_dir)
        linker_path = root / "linker.tsv"
        primary: Linker = (
            DictionaryLinker(linker_path)
            if linker_path.is_file()
            else _Unconfigured(LinkerUnavailable, "fixture linker dictionary")
        )
        fallback_path = root / "fallback_linker.tsv"
        fallback: Linker | None = DictionaryLinker(fallback_path) if fallback_path.is_file() else None
        sparql: SparqlTransport = RecordedSparqlTransport(root)
        chat: ChatBackend = FixtureChatBackend(root)
        search = FixtureSearchBackend(root)
        nli: NliBackend = FixtureNliBackend(root)
        scorer: ScorerBackend = (
            FixtureRelevanceScorer(root) if config.scorer_backend == REMOTE_SCORER else LexicalOverlapScorer()
        )
        blacklist_path = root / "blacklist.txt"
        blacklist = (
            PredicateBlacklist.from_file(blacklist_path)
            if blacklist_path.is_file()
            else PredicateBlacklist.default()
        )
    else:
        if ep.primary_linker_url:
            primary = HttpLinker(ep.primary_linker_url)
        elif ep.linker_dictionary:
            primary = DictionaryLinker(ep.linker_dictionary)
        else:
            primary = _Unconfigured(LinkerUnavailable, "entity linker")
        fallback = HttpLinker(ep.fallback_linker_url) if ep.fallback_linker_url else None
        sparql = HttpSparqlTransport(ep.sparql_endpoint)
        chat = (
            HttpChatBackend(ep.chat_api_url, config.chat_api_key, ep.chat_model)
            if config.chat_api_key
            else _Unconfigured(ChatBackendUnavailable, "chat backend (CHAT_API_KEY)")
        )
        search = (
            ProgrammableSearchClient(config.search_api_key, config.search_engine_id)
            if config.search_api_key and config.search_engine_id
            else _Unconfigured(SearchBackendUnavailable, "web search (SEARCH_API_KEY, SEARCH_ENGINE_ID)")
        )
        nli = RemoteNliBackend(ep.nli_url) if ep.nli_url else _Unconfigured(NliBackendUnavailable, "NLI backend (NLI_URL)")
        if config.scorer_backend == REMOTE_SCORER:
            scorer = (
                RemoteRelevanceScorer(ep.scorer_url)
                if ep.scorer_url
                else _Unconfigured(ScorerUnavailable, "relevance scorer (SCORER_URL)")
            )
        else:
            scorer = LexicalOverlapScorer()
        blacklist = PredicateBlacklist.default()

    triple_source = SparqlTripleSource(sparql)
    return Pipeline(
        config,
        linker_primary=primary,
        linker_fallback=fallback,
        sparql=sparql,
        triple_source=triple_source,
        blacklist=blacklist,
        scorer=scorer,
        chat=chat,
        nli=nli,
        search=search,
    )


def verify_claim(claim: Claim, config: PipelineConfig) -> VerificationResult:
    """One-shot convenience: build, verify, done. Reuse a Pipeline for batches."""
    return build_pipeline(config).verify(claim)
