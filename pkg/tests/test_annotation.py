import pytest

from uccx.annotation import (
    AnnotationError,
    AnnotationSet,
    GroundTruth,
    Span,
    adjudicate,
    annotation_lints,
    fleiss_kappa,
    kappa_band,
    load_annotations,
    load_ground_truth,
    majority_spans,
    save_annotations,
    spans_to_components,
    token_ranges,
    validate_annotation_set,
)
from uccx.components import ComponentKind, UCComponents
from uccx.corpus import Platform, Scenario

GOAL = ComponentKind.GOAL
STEPS = ComponentKind.STEPS
USER = ComponentKind.USER


def make_scenario(text: str, sid: str = "t01") -> Scenario:
    return Scenario(
        id=sid,
        app_name="Example",
        store_url="https://example.org/app",
        platform=Platform.GOOGLE,
        category="Shopping",
        screen_title="Home",
        text=text,
        author_declared_info_types=("name", "email", "location"),
    )


def span(text: str, start: int, end: int, kind: ComponentKind) -> Span:
    return Span(start, end, kind, text[start:end])


def test_span_rejects_backward_range():
    with pytest.raises(AnnotationError, match="not a forward range"):
        Span(5, 5, GOAL, "")
    with pytest.raises(AnnotationError):
        Span(-1, 4, GOAL, "x")


def test_span_overlaps():
    a = Span(0, 5, GOAL, "aaaaa")
    b = Span(4, 8, GOAL, "bbbb")
    c = Span(5, 8, GOAL, "ccc")
    assert a.overlaps(b)
    assert not a.overlaps(c)  # half-open ranges touch without overlapping


def test_same_component_overlap_rejected():
    with pytest.raises(AnnotationError, match="must be disjoint"):
        AnnotationSet("t01", "a1", [
            Span(0, 5, GOAL, "aaaaa"), Span(3, 8, GOAL, "bbbbb"),
        ])


def test_cross_component_overlap_allowed():
    aset = AnnotationSet("t01", "a1", [
        Span(0, 5, GOAL, "aaaaa"), Span(3, 8, USER, "bbbbb"),
    ])
    assert len(aset.spans) == 2


def test_spans_of_sorts_by_position():
    aset = AnnotationSet("t01", "a1", [
        Span(6, 8, STEPS, "x"), Span(0, 2, STEPS, "y"),
    ])
    assert [s.start for s in aset.spans_of(STEPS)] == [0, 6]


def test_validate_wrong_scenario():
    scenario = make_scenario("view orders")
    aset = AnnotationSet("t99", "a1", [])
    with pytest.raises(AnnotationError, match="is for 't99'"):
        validate_annotation_set(scenario, aset)


def test_validate_span_past_end():
    scenario = make_scenario("view orders")
    aset = AnnotationSet("t01", "a1", [Span(0, 100, GOAL, "view orders")])
    with pytest.raises(AnnotationError, match="runs past the end"):
        validate_annotation_set(scenario, aset)


def test_validate_span_text_mismatch():
    scenario = make_scenario("view orders")
    aset = AnnotationSet("t01", "a1", [Span(0, 4, GOAL, "xxxx")])
    with pytest.raises(AnnotationError, match="text mismatch"):
        validate_annotation_set(scenario, aset)


def test_validate_good_set():
    scenario = make_scenario("view orders")
    aset = AnnotationSet("t01", "a1", [span(scenario.text, 0, 4, GOAL)])
    validate_annotation_set(scenario, aset)


def test_goal_overlapping_step_is_linted():
    text = "view my past orders now"
    aset = AnnotationSet("t01", "a1", [
        span(text, 0, 19, GOAL),
        span(text, 0, 4, STEPS),
    ])
    lints = annotation_lints(aset)
    assert [lint.code for lint in lints] == ["GOAL_OVERLAPS_STEP_OR_DP"]
    assert lints[0].annotator_id == "a1"


def test_goal_overlapping_name_is_not_linted():
    text = "view my past orders now"
    aset = AnnotationSet("t01", "a1", [
        span(text, 0, 19, GOAL),
        span(text, 0, 4, ComponentKind.NAME),
    ])
    assert annotation_lints(aset) == []


def test_spans_to_components_document_order():
    text = "open the app then tap orders"
    scenario = make_scenario(text)
    aset = AnnotationSet("t01", "a1", [
        span(text, 18, 28, STEPS),
        span(text, 0, 12, STEPS),
    ])
    comps = spans_to_components(scenario, aset)
    assert comps.steps == ["open the app", "tap orders"]


def test_token_ranges():
    assert token_ranges("ab  cd") == [(0, 2), (4, 6)]
    assert token_ranges("  x ") == [(2, 3)]
    assert token_ranges("") == []


def three_rater_fixture():
    """Two tokens, three raters: two span both tokens, one only the first."""
    scenario = make_scenario("alpha beta")
    full = [span(scenario.text, 0, 10, GOAL)]
    first = [span(scenario.text, 0, 5, GOAL)]
    annotations = [
        AnnotationSet("t01", "r1", list(full)),
        AnnotationSet("t01", "r2", list(full)),
        AnnotationSet("t01", "r3", list(first)),
    ]
    return scenario, annotations


def test_fleiss_kappa_hand_value():
    scenario, annotations = three_rater_fixture()
    kappa = fleiss_kappa([scenario], annotations, GOAL)
    assert kappa == pytest.approx(-0.2, abs=1e-9)


def test_fleiss_kappa_perfect_agreement():
    scenario, annotations = three_rater_fixture()
    clones = [
        AnnotationSet("t01", f"r{i}", list(annotations[0].spans))
        for i in range(3)
    ]
    assert fleiss_kappa([scenario], clones, GOAL) == 1.0


def test_fleiss_kappa_degenerate_all_out():
    # Nobody marks any goal token: every rating is OUT, expected agreement 1.
    scenario = make_scenario("alpha beta")
    empty = [AnnotationSet("t01", f"r{i}", []) for i in range(2)]
    assert fleiss_kappa([scenario], empty, GOAL) == 1.0


def test_fleiss_kappa_rejects_uneven_counts():
    scenario, annotations = three_rater_fixture()
    other = make_scenario("gamma delta", sid="t02")
    with pytest.raises(AnnotationError, match="annotator counts differ"):
        fleiss_kappa([scenario, other], annotations, GOAL)


def test_fleiss_kappa_rejects_single_rater():
    scenario, annotations = three_rater_fixture()
    with pytest.raises(AnnotationError, match="at least 2 annotators"):
        fleiss_kappa([scenario], annotations[:1], GOAL)


@pytest.mark.parametrize(
    "kappa,band",
    [
        (-0.5, "poor"),
        (0.0, "slight"),
        (0.20, "slight"),
        (0.21, "fair"),
        (0.40, "fair"),
        (0.41, "moderate"),
        (0.59, "moderate"),
        (0.61, "substantial"),
        (0.80, "substantial"),
        (0.81, "almost perfect"),
        (1.0, "almost perfect"),
    ],
)
def test_kappa_band(kappa, band):
    assert kappa_band(kappa) == band


def test_majority_spans_strict_majority_and_fusion():
    text = "view orders this month."
    scenario = make_scenario(text)
    annotations = [
        AnnotationSet("t01", "r1", [span(text, 5, 23, STEPS)]),
        AnnotationSet("t01", "r2", [span(text, 5, 16, STEPS)]),
        AnnotationSet("t01", "r3", [span(text, 17, 23, STEPS)]),
    ]
    merged = majority_spans(scenario, annotations)
    assert merged == [Span(5, 23, STEPS, "orders this month.")]


def test_majority_spans_minority_token_dropped():
    text = "view orders now"
    scenario = make_scenario(text)
    annotations = [
        AnnotationSet("t01", "r1", [span(text, 0, 11, STEPS)]),
        AnnotationSet("t01", "r2", [span(text, 0, 4, STEPS)]),
        AnnotationSet("t01", "r3", [span(text, 0, 4, STEPS)]),
    ]
    merged = majority_spans(scenario, annotations)
    assert merged == [Span(0, 4, STEPS, "view")]


def test_majority_spans_snaps_partial_token_coverage_outward():
    # Two of three raters touch "orders" only partially; the token still
    # counts as covered, and the merged span is the whole token.
    text = "view orders now"
    scenario = make_scenario(text)
    annotations = [
        AnnotationSet("t01", "r1", [span(text, 5, 8, STEPS)]),
        AnnotationSet("t01", "r2", [span(text, 7, 11, STEPS)]),
        AnnotationSet("t01", "r3", []),
    ]
    merged = majority_spans(scenario, annotations)
    assert merged == [Span(5, 11, STEPS, "orders")]


def test_majority_spans_needs_two_sets():
    scenario = make_scenario("view orders")
    with pytest.raises(AnnotationError, match="at least 2 annotation sets"):
        majority_spans(scenario, [AnnotationSet("t01", "a1", [])])


def test_adjudicate_produces_ground_truth():
    scenario, annotations = three_rater_fixture()
    gt = adjudicate(scenario, annotations)
    assert gt.scenario_id == "t01"
    assert gt.source == "adjudicated"
    assert gt.components.goal == ["alpha beta"]


def test_annotations_file_round_trip(tmp_path):
    text = "view orders now"
    sets = [
        AnnotationSet("t01", "a1", [span(text, 0, 4, STEPS)]),
        AnnotationSet("t01", "a2", [span(text, 5, 11, GOAL)]),
    ]
    path = tmp_path / "annotations.json"
    save_annotations(sets, path)
    assert load_annotations(path) == sets


def test_load_annotations_rejects_non_list(tmp_path):
    path = tmp_path / "annotations.json"
    path.write_text("{}", "utf-8")
    with pytest.raises(AnnotationError, match="JSON list"):
        load_annotations(path)


def test_load_ground_truth_rejects_duplicates(tmp_path):
    rec = GroundTruth("t01", UCComponents(user=["User"])).as_dict()
    path = tmp_path / "gt.json"
    import json

    path.write_text(json.dumps([rec, rec]), "utf-8")
    with pytest.raises(AnnotationError, match="duplicate ground truth"):
        load_ground_truth(path)


def test_sample_annotations_validate(sample_corpus, sample_annotation_sets):
    assert len(sample_annotation_sets) == 3
    for aset in sample_annotation_sets:
        validate_annotation_set(sample_corpus.get(aset.scenario_id), aset)


def test_sample_annotations_agree_substantially(sample_corpus, sample_annotation_sets):
    scenario = sample_corpus.get("s01")
    for kind in ComponentKind:
        kappa = fleiss_kappa([scenario], sample_annotation_sets, kind)
        assert kappa > 0.6


def test_sample_ground_truth_covers_corpus(sample_corpus, sample_gt):
    assert sorted(sample_gt) == sample_corpus.ids()
    for gt in sample_gt.values():
        gt.components.validate()
