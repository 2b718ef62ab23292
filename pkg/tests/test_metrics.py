import pytest

from uccx.components import COMPONENT_ORDER, ComponentKind, UCComponents
from uccx.embedding import BagEmbedder
from uccx.metrics import (
    IdSetMismatchError,
    evaluate_corpus,
    exact_match,
    score_components,
    semantic_similarity,
    token_f1,
)
from uccx.text import preprocessing_pipeline, raw_pipeline

GT = ["view past orders", "reset password"]
PRED = ["view orders", "reset passwords"]


class ExplodingEmbedder:
    embedder_id = "exploding"

    def embed(self, text):
        raise AssertionError("embedder must not be called for empty sides")


def test_exact_match_ignores_case_by_default():
    assert exact_match(["User"], ["user"]) == 1
    assert exact_match(["User"], ["user"], strict_case=True) == 0


def test_exact_match_trims_elements():
    assert exact_match([" User "], ["User"]) == 1


def test_exact_match_is_order_sensitive():
    assert exact_match(["a", "b"], ["b", "a"]) == 0


def test_exact_match_both_empty():
    assert exact_match([], []) == 1


def test_exact_match_manual_vs_extracted_user():
    assert exact_match(["I"], ["User"]) == 0


def test_token_f1_both_empty():
    assert token_f1([], [], raw_pipeline()) == (1.0, 1.0, 1.0)


def test_token_f1_one_empty():
    assert token_f1(["x"], [], raw_pipeline()) == (0.0, 0.0, 0.0)
    assert token_f1([], ["x"], raw_pipeline()) == (0.0, 0.0, 0.0)


def test_token_f1_no_overlap():
    assert token_f1(["alpha"], ["beta"], raw_pipeline()) == (0.0, 0.0, 0.0)


def test_token_f1_worked_example_raw_is_exact():
    prf = token_f1(GT, PRED, raw_pipeline())
    assert prf == (3 / 4, 3 / 5, 2 / 3)


def test_token_f1_worked_example_preprocessed_is_exact():
    prf = token_f1(GT, PRED, preprocessing_pipeline())
    assert prf == (1.0, 4 / 5, 8 / 9)


def test_token_f1_is_set_based():
    # Duplicate tokens collapse before matching.
    assert token_f1(["view view"], ["view"], raw_pipeline()) == (1.0, 1.0, 1.0)


def test_token_f1_stopword_anomaly():
    assert token_f1(["I"], ["I"], raw_pipeline()) == (1.0, 1.0, 1.0)
    assert token_f1(["I"], ["I"], preprocessing_pipeline()) == (0.0, 0.0, 0.0)


def test_semantic_similarity_empty_conventions():
    embedder = ExplodingEmbedder()
    assert semantic_similarity([], [], embedder) == 1.0
    assert semantic_similarity(["x"], [], embedder) == 0.0
    assert semantic_similarity([], ["x"], embedder) == 0.0


def test_semantic_similarity_identical_text():
    embedder = BagEmbedder(256)
    assert semantic_similarity(GT, list(GT), embedder) == pytest.approx(1.0)


def test_semantic_similarity_joins_with_comma():
    class Recorder:
        embedder_id = "recorder"

        def __init__(self):
            self.texts = []

        def embed(self, text):
            self.texts.append(text)
            return BagEmbedder(64).embed(text)

    recorder = Recorder()
    semantic_similarity(["a", "b"], ["c"], recorder)
    assert recorder.texts == ["a, b", "c"]


def test_score_components_covers_all_kinds():
    gt = UCComponents(user=["I"])
    pred = UCComponents(user=["User"])
    scores = score_components(gt, pred, BagEmbedder(64))
    assert set(scores) == set(COMPONENT_ORDER)
    assert scores[ComponentKind.USER].em == 0.0
    assert scores[ComponentKind.NAME].em == 1.0  # both empty


def test_evaluate_corpus_perfect_on_identical():
    mapping = {
        "s1": UCComponents(user=["User"], steps=["open app"]),
        "s2": UCComponents(goal=["stay fit"]),
    }
    report = evaluate_corpus(mapping, dict(mapping), BagEmbedder(64))
    assert report.scenario_count == 2
    assert report.embedder_id == "bag-64"
    for kind in COMPONENT_ORDER:
        avg = report.averages[kind]
        assert avg.em == avg.f1 == avg.f1_pre == 1.0
        assert avg.sm == pytest.approx(1.0, abs=1e-9)


def test_evaluate_corpus_averages_unweighted():
    gt = {
        "s1": UCComponents(user=["alpha"]),
        "s2": UCComponents(user=["alpha"]),
    }
    pred = {
        "s1": UCComponents(user=["alpha"]),
        "s2": UCComponents(user=["beta"]),
    }
    report = evaluate_corpus(gt, pred, BagEmbedder(64))
    assert report.averages[ComponentKind.USER].f1 == pytest.approx(0.5)
    assert report.averages[ComponentKind.USER].em == pytest.approx(0.5)


def test_evaluate_corpus_id_mismatch():
    gt = {"s1": UCComponents(), "s2": UCComponents()}
    pred = {"s1": UCComponents(), "s3": UCComponents()}
    with pytest.raises(IdSetMismatchError) as exc:
        evaluate_corpus(gt, pred, BagEmbedder(64))
    assert exc.value.missing_from_preds == {"s2"}
    assert exc.value.missing_from_gt == {"s3"}
    assert "s2" in str(exc.value) and "s3" in str(exc.value)


def test_evaluate_corpus_rejects_empty():
    with pytest.raises(ValueError, match="nothing to evaluate"):
        evaluate_corpus({}, {}, BagEmbedder(64))


def test_report_as_dict_shape():
    mapping = {"s1": UCComponents(user=["User"])}
    report = evaluate_corpus(mapping, dict(mapping), BagEmbedder(64))
    doc = report.as_dict()
    assert doc["embedder_id"] == "bag-64"
    assert doc["scenario_count"] == 1
    assert set(doc["averages"]) == {k.value for k in COMPONENT_ORDER}
    assert set(doc["averages"]["user"]) == {
        "em", "precision", "recall", "f1", "f1_pre", "sm",
    }
    assert set(doc["per_scenario"]) == {"s1"}
