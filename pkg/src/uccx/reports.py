"""Report rendering: evaluation tables, presence counts, defect grids.

Every report comes in three shapes: a human-readable text table, a CSV
with a frozen column order, and a plain dict ready for JSON. Bundled
reference results from the originally published study (fixture files
labeled "paper-reference") can render beside current values so a run can
be compared against them; the comparison never claims reproduction.

Frozen CSV layouts:

    evaluation    component,em,f1,f1_pre,sm
    study1        goal,data_practices,steps
    defects       prompt,dps.Q1..dps.Q5,steps.Q1..steps.Q5
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from importlib import resources
from typing import Mapping, Sequence

from uccx.annotation import kappa_band
from uccx.checklist import DefectRecord, DefectStore
from uccx.components import COMPONENT_ORDER, ComponentKind, UCComponents
from uccx.metrics import EvaluationReport

EVALUATION_CSV_COLUMNS = ("component", "em", "f1", "f1_pre", "sm")
STUDY1_CSV_COLUMNS = ("goal", "data_practices", "steps")
DEFECT_QIDS = (
    "dps.Q1", "dps.Q2", "dps.Q3", "dps.Q4", "dps.Q5",
    "steps.Q1", "steps.Q2", "steps.Q3", "steps.Q4", "steps.Q5",
)
DEFECT_CSV_COLUMNS = ("prompt",) + DEFECT_QIDS
REFERENCE_PROMPT_ORDER = ("seed", "refined", "refined_with_examples")


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _text_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def line(cells: Sequence[str]) -> str:
        first = cells[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(cells[1:], widths[1:])]
        return "  ".join([first] + rest).rstrip()
    out = [line(headers), line(["-" * w for w in widths])]
    out.extend(line(row) for row in rows)
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# bundled reference fixtures


def _reference_dir():
    return resources.files("uccx") / "data" / "paper_reference"


def load_reference(name: str) -> dict:
    """Load a bundled reference fixture: "study1", "study2", or "kappa"."""
    if name not in ("study1", "study2", "kappa"):
        raise ValueError(f"unknown reference fixture {name!r}")
    return json.loads((_reference_dir() / f"{name}.json").read_text("utf-8"))


def reference_defect_summary() -> dict[str, dict[str, int]]:
    """Defect counts from the bundled reference inspection records."""
    path = _reference_dir() / "defects.jsonl"
    records = [
        json.loads(line)
        for line in path.read_text("utf-8").splitlines()
        if line.strip()
    ]
    scenario_ids = {r["scenario_id"] for r in records}
    prompt_ids = {r["prompt_id"] for r in records}
    store = DefectStore(scenario_ids, prompt_ids)
    for r in records:
        store.record(DefectRecord.from_dict(r))
    order = [p for p in REFERENCE_PROMPT_ORDER if p in prompt_ids]
    order += sorted(prompt_ids - set(order))
    return store.defect_summary(order)


# ---------------------------------------------------------------------------
# evaluation (per-component metric averages)


def evaluation_csv(report: EvaluationReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EVALUATION_CSV_COLUMNS)
    for kind in COMPONENT_ORDER:
        s = report.averages[kind]
        w.writerow([kind.value, _fmt(s.em), _fmt(s.f1), _fmt(s.f1_pre), _fmt(s.sm)])
    return buf.getvalue()


def per_scenario_csv(report: EvaluationReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([
        "scenario_id", "component", "em", "precision", "recall",
        "f1", "f1_pre", "sm",
    ])
    for sid in sorted(report.per_scenario):
        scores = report.per_scenario[sid]
        for kind in COMPONENT_ORDER:
            s = scores[kind]
            w.writerow([
                sid, kind.value, _fmt(s.em), _fmt(s.precision),
                _fmt(s.recall), _fmt(s.f1), _fmt(s.f1_pre), _fmt(s.sm),
            ])
    return buf.getvalue()


def evaluation_table(
    report: EvaluationReport, reference: Mapping | None = None
) -> str:
    """Per-component averages; reference columns appear when given.

    ``reference`` is the parsed "study2" fixture (see load_reference).
    """
    headers = ["component", "em", "f1", "f1_pre", "sm"]
    ref_components = None
    if reference is not None:
        ref_components = reference["components"]
        headers += ["em (ref)", "f1 (ref)", "f1_pre (ref)", "sm (ref)"]
    rows = []
    for kind in COMPONENT_ORDER:
        s = report.averages[kind]
        row = [kind.label, _fmt(s.em), _fmt(s.f1), _fmt(s.f1_pre), _fmt(s.sm)]
        if ref_components is not None:
            r = ref_components[kind.value]
            row += [_fmt(r["em"]), _fmt(r["f1"]), _fmt(r["f1_pre"]), _fmt(r["sm"])]
        rows.append(row)
    table = _text_table(headers, rows)
    footer = (
        f"scenarios: {report.scenario_count}   embedder: {report.embedder_id}\n"
    )
    if reference is not None:
        footer += "(ref) columns are paper-reference values, for comparison only\n"
    return table + footer


# ---------------------------------------------------------------------------
# presence counts (nonempty goal / data practices / steps per scenario)


@dataclass(frozen=True)
class Study1Report:
    """How many ground-truth records have a nonempty goal, DPs, and steps."""

    counts: dict[str, int]
    corpus_size: int

    def as_dict(self) -> dict:
        return {"counts": dict(self.counts), "corpus_size": self.corpus_size}


def study1_report(ground_truth: Mapping[str, UCComponents]) -> Study1Report:
    counts = {key: 0 for key in STUDY1_CSV_COLUMNS}
    for components in ground_truth.values():
        if components.goal:
            counts["goal"] += 1
        if components.data_practices:
            counts["data_practices"] += 1
        if components.steps:
            counts["steps"] += 1
    return Study1Report(counts=counts, corpus_size=len(ground_truth))


def study1_csv(report: Study1Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(STUDY1_CSV_COLUMNS)
    w.writerow([report.counts[c] for c in STUDY1_CSV_COLUMNS])
    return buf.getvalue()


def study1_table(
    report: Study1Report, reference: Mapping | None = None
) -> str:
    headers = ["", "goal", "data_practices", "steps", "of"]
    rows = [[
        "current",
        str(report.counts["goal"]),
        str(report.counts["data_practices"]),
        str(report.counts["steps"]),
        str(report.corpus_size),
    ]]
    if reference is not None:
        rc = reference["counts"]
        rows.append([
            "paper-reference",
            str(rc["goal"]), str(rc["data_practices"]), str(rc["steps"]),
            str(reference["corpus_size"]),
        ])
    return _text_table(headers, rows)


# ---------------------------------------------------------------------------
# defect grids (prompt rows, question columns)


def defect_csv(
    summary: Mapping[str, Mapping[str, int]],
    prompt_order: Sequence[str] | None = None,
) -> str:
    prompts = list(prompt_order) if prompt_order is not None else sorted(summary)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DEFECT_CSV_COLUMNS)
    for prompt in prompts:
        row = summary[prompt]
        w.writerow([prompt] + [row[qid] for qid in DEFECT_QIDS])
    return buf.getvalue()


def defect_table(
    summary: Mapping[str, Mapping[str, int]],
    prompt_order: Sequence[str] | None = None,
    reference: Mapping[str, Mapping[str, int]] | None = None,
) -> str:
    prompts = list(prompt_order) if prompt_order is not None else sorted(summary)
    headers = ["prompt"] + list(DEFECT_QIDS)
    rows = []
    for prompt in prompts:
        row = summary[prompt]
        rows.append([prompt] + [str(row[qid]) for qid in DEFECT_QIDS])
    if reference is not None:
        for prompt in reference:
            row = reference[prompt]
            rows.append(
                [f"{prompt} (paper-reference)"]
                + [str(row[qid]) for qid in DEFECT_QIDS]
            )
    return _text_table(headers, rows)


# ---------------------------------------------------------------------------
# agreement


def kappa_table(
    kappas: Mapping[ComponentKind, float],
    reference: Mapping | None = None,
) -> str:
    headers = ["component", "kappa", "band"]
    if reference is not None:
        headers += ["kappa (ref)", "band (ref)"]
    rows = []
    for kind in COMPONENT_ORDER:
        if kind not in kappas:
            continue
        k = kappas[kind]
        row = [kind.label, f"{k:.3f}", kappa_band(k)]
        if reference is not None:
            rk = reference["kappa"][kind.value]
            row += [f"{rk:.2f}", kappa_band(rk)]
        rows.append(row)
    return _text_table(headers, rows)
