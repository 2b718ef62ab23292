"""Local HTTP service backing the annotation and inspection UI.

The service owns three stores under a data directory:

    data_dir/annotations/<scenario_id>/<annotator_id>.json
    data_dir/defects.jsonl

plus read-only access to the scenario corpus and the runs directory. All
request and response bodies use the same JSON shapes as the file formats,
so anything saved through the API can be processed by the CLI directly.

The service binds localhost by default and has no authentication; the
annotator identity is whatever id the client supplies. It is a
single-machine research tool, not a multi-tenant system.
"""
from __future__ import annotations

import json
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Union

from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles

from uccx.annotation import (
    AnnotationError,
    AnnotationSet,
    Span,
    annotation_lints,
    fleiss_kappa,
    kappa_band,
    validate_annotation_set,
)
from uccx.checklist import (
    DefectRecord,
    DefectRecordError,
    DefectStore,
    builtin_checklist,
)
from uccx.components import COMPONENT_ORDER, ComponentKind
from uccx.corpus import load_corpus
from uccx.prompt import builtin_presets
from uccx.runs import RunError, list_runs, load_manifest, load_predictions

_FALLBACK_PAGE = """<!doctype html>
<title>uccx service</title>
<h1>uccx service</h1>
<p>The API is up. No UI bundle is built; point --ui-dir at one to serve it
here. The API lives under <code>/api/</code>.</p>
"""


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def create_app(
    corpus_path: str | Path,
    data_dir: str | Path,
    runs_root: str | Path = "runs",
    ui_dir: str | Path | None = None,
) -> FastAPI:
    corpus = load_corpus(corpus_path)
    data_dir = Path(data_dir)
    annotations_dir = data_dir / "annotations"
    defects_path = data_dir / "defects.jsonl"
    write_lock = threading.Lock()

    app = FastAPI(title="uccx", docs_url=None, redoc_url=None)

    # -- scenarios ----------------------------------------------------------

    def _scenario_or_404(scenario_id: str):
        try:
            return corpus.get(scenario_id)
        except KeyError:
            raise HTTPException(404, f"unknown scenario {scenario_id!r}")

    @app.get("/api/scenarios")
    def list_scenarios() -> list[dict]:
        return [
            {
                "id": s.id,
                "app_name": s.app_name,
                "platform": s.platform.value,
                "category": s.category,
                "screen_title": s.screen_title,
            }
            for s in corpus
        ]

    @app.get("/api/scenarios/{scenario_id}")
    def get_scenario(scenario_id: str) -> dict:
        s = _scenario_or_404(scenario_id)
        return {
            "id": s.id,
            "app_name": s.app_name,
            "store_url": s.store_url,
            "platform": s.platform.value,
            "category": s.category,
            "screen_title": s.screen_title,
            "text": s.text,
            "author_declared_info_types": list(s.author_declared_info_types),
        }

    # -- annotations --------------------------------------------------------

    def _annotation_path(scenario_id: str, annotator_id: str) -> Path:
        return annotations_dir / scenario_id / f"{annotator_id}.json"

    @app.get("/api/annotations/{scenario_id}/{annotator_id}")
    def get_annotation(scenario_id: str, annotator_id: str) -> dict:
        _scenario_or_404(scenario_id)
        path = _annotation_path(scenario_id, annotator_id)
        if not path.exists():
            raise HTTPException(
                404,
                f"no annotations for {scenario_id!r} by {annotator_id!r}",
            )
        return json.loads(path.read_text("utf-8"))

    @app.put("/api/annotations/{scenario_id}/{annotator_id}")
    def put_annotation(
        scenario_id: str, annotator_id: str, body: dict = Body(...)
    ) -> dict:
        scenario = _scenario_or_404(scenario_id)
        raw_spans = body.get("spans")
        if not isinstance(raw_spans, list):
            raise HTTPException(422, "body must carry a 'spans' list")
        try:
            spans = [Span.from_dict(raw) for raw in raw_spans]
            aset = AnnotationSet(
                scenario_id=scenario_id,
                annotator_id=annotator_id,
                spans=spans,
            )
            validate_annotation_set(scenario, aset)
        except (AnnotationError, KeyError, TypeError, ValueError) as exc:
            raise HTTPException(422, str(exc))
        doc = {
            "scenario_id": scenario_id,
            "annotator_id": annotator_id,
            "spans": [s.as_dict() for s in aset.spans],
            "lints": [
                {"code": l.code, "annotator_id": l.annotator_id,
                 "detail": l.detail}
                for l in annotation_lints(aset)
            ],
            "updated_at": _utcnow(),
        }
        with write_lock:
            path = _annotation_path(scenario_id, annotator_id)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(
                json.dumps(doc, indent=2, ensure_ascii=False) + "\n", "utf-8"
            )
        return doc

    def _stored_annotation_sets() -> list[AnnotationSet]:
        sets: list[AnnotationSet] = []
        if not annotations_dir.exists():
            return sets
        for path in sorted(annotations_dir.glob("*/*.json")):
            doc = json.loads(path.read_text("utf-8"))
            sets.append(AnnotationSet(
                scenario_id=doc["scenario_id"],
                annotator_id=doc["annotator_id"],
                spans=[Span.from_dict(s) for s in doc["spans"]],
            ))
        return sets

    # -- agreement ----------------------------------------------------------

    @app.get("/api/kappa")
    def get_kappa(component: str | None = None) -> dict:
        sets = _stored_annotation_sets()
        counts: dict[str, int] = {}
        for aset in sets:
            counts[aset.scenario_id] = counts.get(aset.scenario_id, 0) + 1
        eligible_ids = sorted(sid for sid, n in counts.items() if n >= 2)
        if component is not None:
            try:
                kinds = [ComponentKind.from_field(component)]
            except ValueError:
                raise HTTPException(422, f"unknown component {component!r}")
        else:
            kinds = list(COMPONENT_ORDER)

        if not eligible_ids:
            return {
                "components": {},
                "scenario_count": 0,
                "annotator_count": 0,
                "reason": "no scenario has two or more annotation sets",
            }
        n_sets = {counts[sid] for sid in eligible_ids}
        if len(n_sets) != 1:
            return {
                "components": {
                    k.value: {
                        "kappa": None,
                        "reason": "annotator counts differ across scenarios",
                    }
                    for k in kinds
                },
                "scenario_count": len(eligible_ids),
                "annotator_count": None,
                "reason": "annotator counts differ across scenarios",
            }
        scenarios = [corpus.get(sid) for sid in eligible_ids]
        eligible_sets = [a for a in sets if a.scenario_id in set(eligible_ids)]
        components: dict[str, dict] = {}
        for kind in kinds:
            k = fleiss_kappa(scenarios, eligible_sets, kind)
            components[kind.value] = {"kappa": k, "band": kappa_band(k)}
        return {
            "components": components,
            "scenario_count": len(eligible_ids),
            "annotator_count": n_sets.pop(),
        }

    # -- predictions --------------------------------------------------------

    @app.get("/api/predictions/{run_id}/{scenario_id}")
    def get_prediction(run_id: str, scenario_id: str) -> dict:
        try:
            preds = load_predictions(runs_root, run_id)
        except RunError as exc:
            raise HTTPException(404, str(exc))
        for p in preds.predictions:
            if p.scenario_id == scenario_id:
                return p.as_dict()
        raise HTTPException(
            404, f"run {run_id!r} has no prediction for {scenario_id!r}"
        )

    # -- checklist and defects ----------------------------------------------

    @app.get("/api/checklist")
    def get_checklist() -> list[dict]:
        return [q.as_dict() for q in builtin_checklist()]

    def _known_prompt_ids() -> set[str]:
        ids = set(builtin_presets())
        for run_id in list_runs(runs_root):
            try:
                ids.add(load_manifest(runs_root, run_id).preset_id)
            except RunError:
                continue
        return ids

    def _defect_store() -> DefectStore:
        return DefectStore(
            corpus.ids(), _known_prompt_ids(), path=defects_path
        )

    @app.post("/api/defects")
    def post_defects(
        body: Union[list[dict], dict] = Body(...)
    ) -> list[dict]:
        raw_records = body if isinstance(body, list) else [body]
        with write_lock:
            store = _defect_store()
            stored: list[dict] = []
            try:
                for raw in raw_records:
                    rec = DefectRecord.from_dict(raw)
                    stored.append(store.record(rec).as_dict())
            except (DefectRecordError, KeyError, TypeError) as exc:
                raise HTTPException(422, str(exc))
        return stored

    @app.get("/api/summary/defects")
    def get_defect_summary(runs: str | None = None) -> dict:
        store = _defect_store()
        prompt_ids = (
            [p for p in (s.strip() for s in runs.split(",")) if p]
            if runs else None
        )
        summary = store.defect_summary(prompt_ids)
        return {
            "summary": summary,
            "questions": [q.qid for q in builtin_checklist()],
        }

    # -- static UI ----------------------------------------------------------

    ui_path = Path(ui_dir) if ui_dir else None
    if ui_path and ui_path.is_dir():
        app.mount("/", StaticFiles(directory=ui_path, html=True), name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        def root() -> str:
            return _FALLBACK_PAGE

    return app
