"""Command-line entry point: one subcommand per workflow.

    uccx validate         lint a scenario corpus
    uccx extract          render prompts, query a provider, parse into a run
    uccx evaluate         score a run's predictions against ground truth
    uccx study1           presence counts over a ground-truth file
    uccx kappa            inter-annotator agreement per component
    uccx sample           pick one scenario per category, seeded
    uccx inspect-export   defect-summary grid for recorded inspections
    uccx serve            local HTTP service backing the inspection UI
    uccx fsck             integrity check over the runs directory

Exit status is 0 on success, 1 on domain errors (schema violations, id
mismatches, provider failures), 2 on bad arguments.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import FIRST_EXCEPTION, ThreadPoolExecutor, wait
from datetime import datetime, timezone
from pathlib import Path

from uccx import __version__
from uccx.annotation import (
    AnnotationError,
    fleiss_kappa,
    kappa_band,
    load_annotations,
    load_ground_truth,
    sample_annotations_path,
    sample_ground_truth_path,
)
from uccx.checklist import DefectRecord, DefectStore, sample_by_category
from uccx.components import COMPONENT_ORDER, ComponentKind
from uccx.corpus import (
    Corpus,
    CorpusSchemaError,
    load_corpus,
    sample_corpus_path,
    validate_corpus,
)
from uccx.embedding import BagEmbedder, HttpEmbedder
from uccx.llm import (
    DEFAULT_MAX_OUTPUT_TOKENS,
    DEFAULT_MODEL,
    DEFAULT_TEMPERATURE,
    ChatRequest,
    LiveProvider,
    MockProvider,
    ProviderError,
    ReplayProvider,
)
from uccx.metrics import IdSetMismatchError, evaluate_corpus
from uccx.parser import parse_response
from uccx.prompt import PresetError, builtin_presets, load_presets, render
from uccx.reports import (
    REFERENCE_PROMPT_ORDER,
    defect_csv,
    defect_table,
    evaluation_csv,
    evaluation_table,
    kappa_table,
    load_reference,
    per_scenario_csv,
    reference_defect_summary,
    study1_csv,
    study1_report,
    study1_table,
)
from uccx.runs import (
    Prediction,
    PredictionSet,
    RunError,
    RunManifest,
    corpus_digest,
    fsck,
    load_predictions,
    run_dir,
    save_manifest,
    save_predictions,
)

DEFAULT_RUNS_ROOT = "runs"
DEFAULT_CHAT_BASE_URL = "https://api.openai.com/v1"


def _load_corpus(path: str) -> Corpus:
    return load_corpus(path)


def _err(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 1


# ---------------------------------------------------------------------------
# validate


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        corpus = _load_corpus(args.corpus)
    except CorpusSchemaError as exc:
        return _err(str(exc))
    lints = validate_corpus(corpus)
    for lint in lints:
        print(f"{lint.scenario_id}: {lint.code.value}: {lint.detail}")
    print(f"{len(corpus)} scenarios, {len(lints)} lint(s), 0 schema errors")
    return 0


# ---------------------------------------------------------------------------
# extract


def _build_provider(args: argparse.Namespace, corpus: Corpus):
    if args.provider == "mock":
        gt = load_ground_truth(args.mock_ground_truth)
        components = {sid: rec.components for sid, rec in gt.items()}
        return MockProvider.from_ground_truth(corpus, components)
    if args.provider == "replay":
        if not args.cache_dir:
            raise ProviderError("replay provider needs --cache-dir")
        return ReplayProvider(args.cache_dir)
    if not args.cache_dir:
        return LiveProvider(args.base_url)
    return LiveProvider(args.base_url, cache_dir=args.cache_dir)


def cmd_extract(args: argparse.Namespace) -> int:
    try:
        corpus = _load_corpus(args.corpus)
    except CorpusSchemaError as exc:
        return _err(str(exc))
    try:
        presets = (
            load_presets(args.presets_file) if args.presets_file
            else builtin_presets()
        )
        if args.preset not in presets:
            raise PresetError(
                f"unknown preset {args.preset!r}; have {sorted(presets)}"
            )
        preset = presets[args.preset]
        provider = _build_provider(args, corpus)
    except (PresetError, ProviderError, AnnotationError) as exc:
        return _err(str(exc))

    run_id = args.run_id or datetime.now(timezone.utc).strftime(
        "run-%Y%m%d-%H%M%S"
    )
    manifest = RunManifest(
        run_id=run_id,
        corpus_path=str(args.corpus),
        corpus_sha256=corpus_digest(args.corpus),
        preset_id=preset.id,
        model_id=args.model_id,
        temperature=args.temperature,
        provider_id=provider.provider_id,
    )
    save_manifest(args.runs_root, manifest)

    def extract_one(scenario) -> Prediction:
        request = ChatRequest(
            prompt=render(preset, scenario),
            model_id=args.model_id,
            temperature=args.temperature,
            max_output_tokens=args.max_output_tokens,
        )
        try:
            response = provider.complete(request)
        except ProviderError as exc:
            raise ProviderError(f"scenario {scenario.id}: {exc}") from exc
        report = parse_response(response.text)
        return Prediction(
            scenario_id=scenario.id,
            components=report.components,
            warnings=tuple(w.as_dict() for w in report.warnings),
        )

    workers = args.workers or getattr(provider, "max_in_flight", 2)
    scenarios = list(corpus)
    done: dict[str, Prediction] = {}
    failure: ProviderError | None = None
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(extract_one, s): s for s in scenarios}
        finished, pending = wait(futures, return_when=FIRST_EXCEPTION)
        for fut in pending:
            fut.cancel()
        for fut in finished:
            if fut.cancelled():
                continue
            exc = fut.exception()
            if exc is not None:
                if failure is None:
                    failure = exc  # keep one; any others are equivalent
                continue
            pred = fut.result()
            done[pred.scenario_id] = pred

    ordered = [done[s.id] for s in scenarios if s.id in done]
    preds = PredictionSet(
        run_id=run_id, predictions=ordered, incomplete=failure is not None
    )
    path = save_predictions(args.runs_root, preds)
    if failure is not None:
        print(
            f"aborted: {failure}\n"
            f"partial predictions ({len(ordered)}/{len(scenarios)}) kept at "
            f"{path} and marked incomplete",
            file=sys.stderr,
        )
        return 1
    n_warn = sum(len(p.warnings) for p in ordered)
    print(
        f"run {run_id}: {len(ordered)} predictions, {n_warn} parse "
        f"warning(s)\nwrote {path}"
    )
    return 0


# ---------------------------------------------------------------------------
# evaluate


def _build_embedder(args: argparse.Namespace):
    if args.embedder == "bag":
        return BagEmbedder(dim=args.dim)
    return HttpEmbedder(
        args.embed_base_url,
        model_id=args.embed_model,
        dim=args.dim,
        cache_dir=args.cache_dir,
        offline=args.offline,
    )


def cmd_evaluate(args: argparse.Namespace) -> int:
    try:
        gt = load_ground_truth(args.gt)
        preds = load_predictions(args.runs_root, args.run_id)
    except (AnnotationError, RunError, OSError) as exc:
        return _err(str(exc))
    if preds.incomplete:
        print(
            f"warning: run {args.run_id} is marked incomplete", file=sys.stderr
        )
    embedder = _build_embedder(args)
    try:
        report = evaluate_corpus(
            {sid: rec.components for sid, rec in gt.items()},
            preds.by_id(),
            embedder,
            strict_case=args.strict_case,
        )
    except IdSetMismatchError as exc:
        return _err(str(exc))

    out_dir = Path(args.out) if args.out else run_dir(args.runs_root, args.run_id)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "metrics.csv").write_text(evaluation_csv(report), "utf-8")
    (out_dir / "metrics.json").write_text(
        json.dumps(report.as_dict(), indent=2, ensure_ascii=False) + "\n",
        "utf-8",
    )
    (out_dir / "per_scenario.csv").write_text(per_scenario_csv(report), "utf-8")

    reference = None if args.no_reference else load_reference("study2")
    print(evaluation_table(report, reference), end="")
    print(f"wrote {out_dir / 'metrics.csv'}")
    return 0


# ---------------------------------------------------------------------------
# study1


def cmd_study1(args: argparse.Namespace) -> int:
    try:
        gt = load_ground_truth(args.gt)
    except (AnnotationError, OSError) as exc:
        return _err(str(exc))
    report = study1_report({sid: rec.components for sid, rec in gt.items()})
    reference = None if args.no_reference else load_reference("study1")
    print(study1_table(report, reference), end="")
    if args.out:
        Path(args.out).write_text(study1_csv(report), "utf-8")
        print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# kappa


def cmd_kappa(args: argparse.Namespace) -> int:
    try:
        corpus = _load_corpus(args.corpus)
        annotations = load_annotations(args.annotations)
    except (CorpusSchemaError, AnnotationError, OSError) as exc:
        return _err(str(exc))
    by_scenario: dict[str, int] = {}
    for aset in annotations:
        by_scenario[aset.scenario_id] = by_scenario.get(aset.scenario_id, 0) + 1
    eligible = [
        corpus.get(sid) for sid, n in sorted(by_scenario.items()) if n >= 2
    ]
    if not eligible:
        return _err("no scenario has two or more annotation sets")

    kinds = (
        [ComponentKind.from_field(args.component)]
        if args.component else list(COMPONENT_ORDER)
    )
    kappas: dict[ComponentKind, float] = {}
    for kind in kinds:
        try:
            kappas[kind] = fleiss_kappa(eligible, annotations, kind)
        except AnnotationError as exc:
            return _err(str(exc))
    reference = None if args.no_reference else load_reference("kappa")
    print(kappa_table(kappas, reference), end="")
    print(f"scenarios: {len(eligible)}, annotators per scenario: "
          f"{by_scenario[eligible[0].id]}")
    if args.out:
        doc = {
            kind.value: {"kappa": k, "band": kappa_band(k)}
            for kind, k in kappas.items()
        }
        Path(args.out).write_text(
            json.dumps(doc, indent=2, ensure_ascii=False) + "\n", "utf-8"
        )
        print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# sample


def cmd_sample(args: argparse.Namespace) -> int:
    try:
        corpus = _load_corpus(args.corpus)
    except CorpusSchemaError as exc:
        return _err(str(exc))
    try:
        ids = sample_by_category(corpus, args.seed)
    except ValueError as exc:
        return _err(str(exc))
    for sid in ids:
        print(f"{sid}\t{corpus.get(sid).category}")
    if args.out:
        Path(args.out).write_text(
            json.dumps(ids, indent=2) + "\n", "utf-8"
        )
        print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# inspect-export


def cmd_inspect_export(args: argparse.Namespace) -> int:
    if bool(args.run_id) == bool(args.defects):
        return _err("give exactly one of --run-id or --defects")
    path = (
        Path(args.defects) if args.defects
        else run_dir(args.runs_root, args.run_id) / "defects.jsonl"
    )
    if not path.exists():
        return _err(f"no defect records at {path}")
    records = [
        json.loads(line)
        for line in path.read_text("utf-8").splitlines()
        if line.strip()
    ]
    if not records:
        return _err(f"no defect records at {path}")
    store = DefectStore(
        {r["scenario_id"] for r in records},
        {r["prompt_id"] for r in records},
    )
    for r in records:
        store.record(DefectRecord.from_dict(r))
    prompts = sorted({r["prompt_id"] for r in records})
    ordered = [p for p in REFERENCE_PROMPT_ORDER if p in prompts]
    ordered += [p for p in prompts if p not in ordered]
    summary = store.defect_summary(ordered)
    reference = None if args.no_reference else reference_defect_summary()
    print(defect_table(summary, ordered, reference), end="")
    if args.out:
        Path(args.out).write_text(defect_csv(summary, ordered), "utf-8")
        print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# serve / fsck


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from uccx.server import create_app

    app = create_app(
        corpus_path=args.corpus,
        data_dir=args.data_dir,
        runs_root=args.runs_root,
        ui_dir=args.ui_dir or "frontend/dist",
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_fsck(args: argparse.Namespace) -> int:
    findings = fsck(args.runs_root)
    for f in findings:
        print(f"{f.run_id}: {f.severity}: {f.message}")
    errors = sum(1 for f in findings if f.severity == "error")
    print(f"{len(findings)} finding(s), {errors} error(s)")
    return 1 if errors else 0


# ---------------------------------------------------------------------------
# argument wiring


def _add_corpus_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--corpus", default=str(sample_corpus_path()),
        help="scenario corpus JSON (default: bundled 16-scenario sample)",
    )


def _add_gt_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--gt", default=str(sample_ground_truth_path()),
        help="ground-truth JSON (default: bundled sample ground truth)",
    )


def _add_runs_root(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--runs-root", default=DEFAULT_RUNS_ROOT,
        help="directory holding run artifacts (default: ./runs)",
    )


def _add_no_reference(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--no-reference", action="store_true",
        help="omit the bundled paper-reference comparison values",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uccx",
        description="Extract use-case components from app scenarios and "
        "evaluate the extractions.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="lint a scenario corpus")
    _add_corpus_flag(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("extract", help="run extraction over a corpus")
    _add_corpus_flag(p)
    _add_runs_root(p)
    p.add_argument("--preset", default="seed", help="prompt preset id")
    p.add_argument(
        "--presets-file", default=None,
        help="JSON file of prompt presets (default: built-ins)",
    )
    p.add_argument(
        "--provider", choices=("live", "replay", "mock"), default="mock"
    )
    p.add_argument(
        "--mock-ground-truth", default=str(sample_ground_truth_path()),
        help="ground truth the mock provider echoes back",
    )
    p.add_argument(
        "--cache-dir", default=None,
        help="chat replay cache directory (required for --provider replay)",
    )
    p.add_argument("--base-url", default=DEFAULT_CHAT_BASE_URL)
    p.add_argument("--model-id", default=DEFAULT_MODEL)
    p.add_argument("--temperature", type=float, default=DEFAULT_TEMPERATURE)
    p.add_argument(
        "--max-output-tokens", type=int, default=DEFAULT_MAX_OUTPUT_TOKENS
    )
    p.add_argument(
        "--workers", type=int, default=None,
        help="parallel scenarios (default: the provider's in-flight bound)",
    )
    p.add_argument("--run-id", default=None)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("evaluate", help="score a run against ground truth")
    _add_gt_flag(p)
    _add_runs_root(p)
    _add_no_reference(p)
    p.add_argument("--run-id", required=True)
    p.add_argument("--embedder", choices=("live", "bag"), default="bag")
    p.add_argument("--dim", type=int, default=1024)
    p.add_argument("--embed-base-url", default=DEFAULT_CHAT_BASE_URL)
    p.add_argument("--embed-model", default="text-embedding-ada-002")
    p.add_argument(
        "--cache-dir", default=None, help="embedding replay cache directory"
    )
    p.add_argument(
        "--offline", action="store_true",
        help="serve embeddings from the cache only",
    )
    p.add_argument("--strict-case", action="store_true")
    p.add_argument(
        "--out", default=None,
        help="directory for metrics files (default: the run directory)",
    )
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("study1", help="presence counts over ground truth")
    _add_gt_flag(p)
    _add_no_reference(p)
    p.add_argument("--out", default=None, help="write the counts CSV here")
    p.set_defaults(func=cmd_study1)

    p = sub.add_parser("kappa", help="inter-annotator agreement")
    _add_corpus_flag(p)
    _add_no_reference(p)
    p.add_argument(
        "--annotations", default=str(sample_annotations_path()),
        help="annotation sets JSON (default: bundled example)",
    )
    p.add_argument(
        "--component", default=None,
        help="single component field name (default: all seven)",
    )
    p.add_argument("--out", default=None, help="write kappa JSON here")
    p.set_defaults(func=cmd_kappa)

    p = sub.add_parser("sample", help="one scenario per category")
    _add_corpus_flag(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None, help="write sampled ids JSON here")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser(
        "inspect-export", help="defect-summary grid from inspection records"
    )
    _add_runs_root(p)
    _add_no_reference(p)
    p.add_argument("--run-id", default=None)
    p.add_argument(
        "--defects", default=None, help="defect records JSONL (instead of a run)"
    )
    p.add_argument("--out", default=None, help="write the summary CSV here")
    p.set_defaults(func=cmd_inspect_export)

    p = sub.add_parser("serve", help="HTTP service for annotation/inspection")
    _add_corpus_flag(p)
    _add_runs_root(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument(
        "--data-dir", default="uccx_data",
        help="where annotations and defect records are stored",
    )
    p.add_argument(
        "--ui-dir", default=None,
        help="static UI bundle to serve at / (default: frontend/dist if present)",
    )
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("fsck", help="check run artifacts for integrity")
    _add_runs_root(p)
    p.set_defaults(func=cmd_fsck)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
