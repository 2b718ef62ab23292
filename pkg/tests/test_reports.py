import pytest

from uccx.components import COMPONENT_ORDER, ComponentKind, UCComponents
from uccx.embedding import BagEmbedder
from uccx.metrics import evaluate_corpus
from uccx.reports import (
    DEFECT_CSV_COLUMNS,
    DEFECT_QIDS,
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


@pytest.fixture(scope="module")
def perfect_report():
    mapping = {
        "s1": UCComponents(user=["User"], steps=["open app"]),
        "s2": UCComponents(goal=["stay fit"]),
    }
    return evaluate_corpus(mapping, dict(mapping), BagEmbedder(64))


def test_evaluation_csv_layout(perfect_report):
    lines = evaluation_csv(perfect_report).splitlines()
    assert lines[0] == "component,em,f1,f1_pre,sm"
    assert [ln.split(",")[0] for ln in lines[1:]] == [
        k.value for k in COMPONENT_ORDER
    ]
    assert lines[1] == "name,1.000,1.000,1.000,1.000"


def test_per_scenario_csv_layout(perfect_report):
    lines = per_scenario_csv(perfect_report).splitlines()
    assert lines[0] == "scenario_id,component,em,precision,recall,f1,f1_pre,sm"
    assert len(lines) == 1 + 2 * 7
    assert lines[1].startswith("s1,name,")


def test_evaluation_table_without_reference(perfect_report):
    table = evaluation_table(perfect_report)
    assert "UC-Name" in table and "UC-Steps" in table
    assert "scenarios: 2   embedder: bag-64" in table
    assert "(ref)" not in table


def test_evaluation_table_with_reference(perfect_report):
    table = evaluation_table(perfect_report, load_reference("study2"))
    assert "em (ref)" in table
    assert "0.552" in table  # system f1_pre reference value
    assert "paper-reference values, for comparison only" in table


def test_study1_report_counts():
    gt = {
        "a": UCComponents(goal=["g"], steps=["s"]),
        "b": UCComponents(data_practices=["d"], steps=["s"]),
        "c": UCComponents(),
    }
    report = study1_report(gt)
    assert report.counts == {"goal": 1, "data_practices": 1, "steps": 2}
    assert report.corpus_size == 3
    assert study1_csv(report).splitlines() == [
        "goal,data_practices,steps",
        "1,1,2",
    ]


def test_study1_table_with_reference():
    report = study1_report({"a": UCComponents(goal=["g"])})
    table = study1_table(report, load_reference("study1"))
    lines = table.splitlines()
    current = next(ln for ln in lines if ln.startswith("current"))
    reference = next(ln for ln in lines if ln.startswith("paper-reference"))
    assert current.split()[1:] == ["1", "0", "0", "1"]
    assert reference.split()[1:] == ["47", "45", "50", "50"]


def test_defect_csv_header_and_rows():
    summary = {
        "seed": {qid: 0 for qid in DEFECT_QIDS},
        "refined": {qid: 1 for qid in DEFECT_QIDS},
    }
    lines = defect_csv(summary, ["seed", "refined"]).splitlines()
    assert lines[0] == ",".join(DEFECT_CSV_COLUMNS)
    assert lines[0] == (
        "prompt,dps.Q1,dps.Q2,dps.Q3,dps.Q4,dps.Q5,"
        "steps.Q1,steps.Q2,steps.Q3,steps.Q4,steps.Q5"
    )
    assert lines[1] == "seed,0,0,0,0,0,0,0,0,0,0"
    assert lines[2] == "refined,1,1,1,1,1,1,1,1,1,1"


def test_defect_table_appends_reference_rows():
    summary = {"seed": {qid: 0 for qid in DEFECT_QIDS}}
    table = defect_table(
        summary, ["seed"], reference=reference_defect_summary()
    )
    assert "seed (paper-reference)" in table
    assert "refined_with_examples (paper-reference)" in table


def test_kappa_table_bands():
    kappas = {ComponentKind.NAME: 1.0, ComponentKind.GOAL: 0.35}
    table = kappa_table(kappas)
    assert "almost perfect" in table
    assert "fair" in table
    assert "UC-DPs" not in table  # unscored components are omitted


def test_kappa_table_with_reference():
    kappas = {kind: 1.0 for kind in COMPONENT_ORDER}
    table = kappa_table(kappas, load_reference("kappa"))
    assert "kappa (ref)" in table
    assert "0.59" in table  # name reference
    assert "substantial" in table


def test_load_reference_shapes():
    study1 = load_reference("study1")
    assert study1["label"] == "paper-reference"
    assert study1["corpus_size"] == 50
    study2 = load_reference("study2")
    assert set(study2["components"]) == {k.value for k in COMPONENT_ORDER}
    kappa = load_reference("kappa")
    assert kappa["annotators"] == 3


def test_load_reference_unknown():
    with pytest.raises(ValueError):
        load_reference("study9")


def test_reference_defect_summary_order_and_cells():
    summary = reference_defect_summary()
    assert tuple(summary) == REFERENCE_PROMPT_ORDER
    assert summary["seed"]["steps.Q4"] == 16
    assert summary["refined"]["dps.Q4"] == 2
    assert summary["refined_with_examples"]["steps.Q4"] == 11
    # Actor and goal questions carry no counts in the reference data.
    assert summary["seed"]["actor.Q1"] == 0
    assert summary["seed"]["goal.Q1"] == 0
