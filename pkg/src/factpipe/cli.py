"""Command-line interface.

Subcommands: verify one claim, eval a dataset, export-nei worksheets, agree
over annotated worksheets, and serve the REST API. JSON results go to
stdout; logs and progress go to stderr. Exit codes: 0 success, 1 runtime
failure, 2 usage error (argparse's own).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Sequence

from .annotation import export_nei_csv, read_annotation_csv, render_annotation_csv, review_sufficiency, sample_nei_rows
from .classify import classify_zero_shot
from .config import load_config
from .domain import Claim, Label, Stage, VerificationResult
from .errors import FormatError, PipelineError
from .evaluation import (
    ADAPTERS,
    MODE_SRN,
    compute_metrics,
    fallback_rate,
    load_fever_jsonl,
    run_eval,
    sample_sr_subset,
    write_results_jsonl,
)
from .orchestrator import MODE_FULL, MODE_KG_ONLY, MODE_WEB_ONLY, build_pipeline

log = logging.getLogger(__name__)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="KEY = VALUE config file")
    parser.add_argument("--fixture-dir", help="replay recorded backend responses from this directory")
    parser.add_argument("--mode", choices=[MODE_FULL, MODE_KG_ONLY, MODE_WEB_ONLY])
    parser.add_argument("--kg-classifier", choices=["llm", "nli"])
    parser.add_argument("--web-classifier", choices=["llm", "nli"])
    parser.add_argument("--scorer-backend", choices=["lexical_fallback", "remote_cross_encoder"])
    parser.add_argument("--k", type=int, help="evidence items forwarded to the classifier")
    parser.add_argument("--n-max", type=int, help="web snippet retrieval cap")
    parser.add_argument("--budget-seconds", type=float)


def _config_from_args(args: argparse.Namespace):
    overrides = {
        key: getattr(args, key)
        for key in ("fixture_dir", "mode", "kg_classifier", "web_classifier", "scorer_backend", "k", "n_max", "budget_seconds")
        if getattr(args, key, None) is not None
    }
    return load_config(config_file=args.config, overrides=overrides)


def _sanitize(value: Any) -> Any:
    """NaN has no JSON spelling; emit null instead."""
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, dict):
        return {k: _sanitize(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_sanitize(v) for v in value]
    return value


def _print_json(payload: Any) -> None:
    print(json.dumps(_sanitize(payload), ensure_ascii=False, indent=2))


# --- subcommands -------------------------------------------------------------


def _cmd_verify(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    pipeline = build_pipeline(config)
    try:
        result = pipeline.verify(Claim(id=args.id, text=args.claim))
    except PipelineError as exc:
        log.error("%s", exc)
        for note in exc.diagnostics:
            log.error("  %s", note)
        return 1
    _print_json(result.to_json_dict())
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    try:
        claims = load_fever_jsonl(args.dataset, ADAPTERS[args.adapter])
    except FormatError as exc:
        log.error("%s", exc)
        return 1
    if args.metrics_mode == "sr":
        claims = [c for c in claims if c.gold_label is not Label.NEI]
    if args.sample is not None:
        claims = sample_sr_subset(claims, args.sample, args.seed) if args.metrics_mode == "sr" else claims[: args.sample]
    if not claims:
        log.error("no claims to evaluate")
        return 1

    if args.system == "zero-shot":
        pipeline = build_pipeline(config)
        chat = pipeline.chat_backend

        def predict(claim: Claim) -> VerificationResult:
            verdict = classify_zero_shot(claim, chat)
            return VerificationResult(
                claim_id=claim.id,
                final_label=verdict.label,
                stage=Stage.NONE,
                evidence=(),
                verdict=verdict,
                fallback_used=False,
            )

    else:
        mode = {"pipeline": config.mode, "kg-only": MODE_KG_ONLY, "web-only": MODE_WEB_ONLY}[args.system]
        if mode != config.mode:
            from dataclasses import replace

            config = replace(config, mode=mode)
        pipeline = build_pipeline(config)
        predict = pipeline.verify

    try:
        results = run_eval(claims, predict, workers=args.workers, on_error=args.on_error)
    except PipelineError as exc:
        log.error("evaluation aborted: %s", exc)
        return 1
    if args.save_results:
        write_results_jsonl(results, args.save_results)
        log.info("wrote %d results to %s", len(results), args.save_results)

    report = compute_metrics(
        [c.gold_label for c in claims],
        [r.final_label for r in results],
        mode=args.metrics_mode,
        fallback_rate=fallback_rate(results),
    )
    print(report.format_table(), file=sys.stderr)
    _print_json(report.to_json_dict())
    return 0


def _cmd_export_nei(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    try:
        claims = load_fever_jsonl(args.dataset, ADAPTERS[args.adapter])
    except FormatError as exc:
        log.error("%s", exc)
        return 1

    if args.results:
        from .evaluation import read_results_jsonl

        results = read_results_jsonl(args.results)
    else:
        pipeline = build_pipeline(config)
        nei_claims = [c for c in claims if c.gold_label is Label.NEI]
        log.info("verifying %d gold-NEI claims", len(nei_claims))
        results = run_eval(nei_claims, pipeline.verify, workers=args.workers, on_error=args.on_error)

    rows = sample_nei_rows(results, claims, n=args.n, seed=args.seed)
    csv_text = render_annotation_csv(rows)
    Path(args.output).write_text(csv_text, encoding="utf-8")
    log.info("wrote %d rows to %s", len(rows), args.output)

    if args.llm_review:
        pipeline = build_pipeline(config)
        reviewed = review_sufficiency(rows, pipeline.chat_backend)
        review_path = Path(args.output).with_suffix(".llm.csv")
        review_path.write_text(render_annotation_csv(reviewed), encoding="utf-8")
        log.info("wrote model sufficiency judgments to %s", review_path)
    return 0


def _cmd_agree(args: argparse.Namespace) -> int:
    from .annotation import sufficiency_stats

    per_annotator = {}
    for path in args.annotations:
        name = Path(path).stem
        per_annotator[name] = read_annotation_csv(path)
    llm_rows = read_annotation_csv(args.llm) if args.llm else None
    report = sufficiency_stats(per_annotator, llm_rows)
    _print_json(report)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    config = _config_from_args(args)
    app = create_app(config, max_in_flight=args.max_in_flight)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="factpipe", description="Two-stage fact verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="verify a single claim")
    p_verify.add_argument("--claim", required=True)
    p_verify.add_argument("--id", default="cli")
    _add_config_flags(p_verify)
    p_verify.set_defaults(func=_cmd_verify)

    p_eval = sub.add_parser("eval", help="run a dataset and report metrics")
    p_eval.add_argument("--dataset", required=True, help="JSONL claim file")
    p_eval.add_argument("--adapter", choices=sorted(ADAPTERS), default="fever")
    p_eval.add_argument("--metrics-mode", choices=["sr", "srn"], default=MODE_SRN)
    p_eval.add_argument("--system", choices=["pipeline", "kg-only", "web-only", "zero-shot"], default="pipeline")
    p_eval.add_argument("--sample", type=int, help="sample size (seed-deterministic in sr mode)")
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--workers", type=int, default=1)
    p_eval.add_argument("--on-error", choices=["raise", "nei"], default="raise")
    p_eval.add_argument("--save-results", help="also write per-claim results JSONL here")
    _add_config_flags(p_eval)
    p_eval.set_defaults(func=_cmd_eval)

    p_export = sub.add_parser("export-nei", help="export a re-annotation worksheet for overturned NEI claims")
    p_export.add_argument("--dataset", required=True)
    p_export.add_argument("--adapter", choices=sorted(ADAPTERS), default="fever")
    p_export.add_argument("--results", help="reuse saved results JSONL instead of running the pipeline")
    p_export.add_argument("-n", type=int, default=150)
    p_export.add_argument("--seed", type=int, default=0)
    p_export.add_argument("--output", required=True)
    p_export.add_argument("--workers", type=int, default=1)
    p_export.add_argument("--on-error", choices=["raise", "nei"], default="nei")
    p_export.add_argument("--llm-review", action="store_true", help="also write model sufficiency judgments")
    _add_config_flags(p_export)
    p_export.set_defaults(func=_cmd_export_nei)

    p_agree = sub.add_parser("agree", help="agreement statistics over annotated worksheets")
    p_agree.add_argument("annotations", nargs="+", help="annotated CSVs, one per human annotator")
    p_agree.add_argument("--llm", help="model-annotated CSV for human/model comparison")
    p_agree.set_defaults(func=_cmd_agree)

    p_serve = sub.add_parser("serve", help="run the REST service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--max-in-flight", type=int, default=8)
    _add_config_flags(p_serve)
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
