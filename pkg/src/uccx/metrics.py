"""Scoring extracted components against ground truth.

Three metrics per component:

* ``exact_match`` -- 1 when the comma-joined, trimmed element lists are the
  same string (lowercased unless ``strict_case``), else 0.
* ``token_f1`` -- set precision/recall/F1 over the deduplicated tokens of
  the concatenated elements, computed once with the raw pipeline and once
  with the full preprocessing pipeline.
* ``semantic_similarity`` -- cosine of the embeddings of the comma-joined
  element strings.

Empty-list conventions: when both sides are empty the extraction agreed on
absence, which scores 1 everywhere; when exactly one side is empty nothing
overlaps, which scores 0. A nonempty list whose tokens are all removed by
preprocessing (a lone pronoun, say) has nothing measurable left and scores
(0, 0, 0) -- this is exactly how stopword removal can crater the F1 of a
component whose annotations are mostly the word "I".
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

from uccx.components import COMPONENT_ORDER, ComponentKind, UCComponents
from uccx.embedding import Embedder, cosine
from uccx.text import TokenPipeline, preprocessing_pipeline, raw_pipeline


class PRF(NamedTuple):
    precision: float
    recall: float
    f1: float


def _canonical(elements: list[str], strict_case: bool) -> str:
    joined = ", ".join(el.strip() for el in elements)
    return joined if strict_case else joined.lower()


def exact_match(
    gt: list[str], pred: list[str], *, strict_case: bool = False
) -> int:
    """1 when both sides canonicalize to the same string.

    Elements are trimmed and comma-joined in order; comparison lowercases
    unless ``strict_case`` is set. Two empty lists match.
    """
    return int(_canonical(gt, strict_case) == _canonical(pred, strict_case))


def _token_set(elements: list[str], pipe: TokenPipeline) -> set[str]:
    return set(pipe.apply(", ".join(elements)))


def token_f1(gt: list[str], pred: list[str], pipe: TokenPipeline) -> PRF:
    """Set-based precision, recall, and F1 over pipeline tokens.

    F1 is the harmonic mean 2PR/(P+R). Conventions: both element lists
    empty -> (1, 1, 1); exactly one empty -> (0, 0, 0); token sets emptied
    by the pipeline or zero overlap -> (0, 0, 0).
    """
    if not gt and not pred:
        return PRF(1.0, 1.0, 1.0)
    if not gt or not pred:
        return PRF(0.0, 0.0, 0.0)
    gt_tokens = _token_set(gt, pipe)
    pred_tokens = _token_set(pred, pipe)
    tp = len(gt_tokens & pred_tokens)
    if tp == 0:
        return PRF(0.0, 0.0, 0.0)
    precision = tp / len(pred_tokens)
    recall = tp / len(gt_tokens)
    # 2PR/(P+R) reduced to integers: one rounding instead of three.
    f1 = 2 * tp / (len(pred_tokens) + len(gt_tokens))
    return PRF(precision, recall, f1)


def semantic_similarity(gt: list[str], pred: list[str], embedder: Embedder) -> float:
    """Cosine similarity of the comma-joined element strings.

    Both empty -> 1.0 and one empty -> 0.0, with the embedder not called
    at all in either case.
    """
    if not gt and not pred:
        return 1.0
    if not gt or not pred:
        return 0.0
    return cosine(
        embedder.embed(", ".join(gt)), embedder.embed(", ".join(pred))
    )


@dataclass(frozen=True)
class ComponentScore:
    """All metric values for one (scenario, component) pair or an average."""

    em: float
    precision: float
    recall: float
    f1: float
    f1_pre: float
    sm: float

    def as_dict(self) -> dict:
        return {
            "em": self.em,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "f1_pre": self.f1_pre,
            "sm": self.sm,
        }


class IdSetMismatchError(ValueError):
    """Ground truth and predictions cover different scenario ids."""

    def __init__(self, missing_from_preds: set[str], missing_from_gt: set[str]):
        parts = []
        if missing_from_preds:
            parts.append(f"missing from predictions: {sorted(missing_from_preds)}")
        if missing_from_gt:
            parts.append(f"missing from ground truth: {sorted(missing_from_gt)}")
        super().__init__("scenario id sets differ; " + "; ".join(parts))
        self.missing_from_preds = missing_from_preds
        self.missing_from_gt = missing_from_gt


@dataclass
class EvaluationReport:
    """Per-scenario scores plus the per-component unweighted means."""

    per_scenario: dict[str, dict[ComponentKind, ComponentScore]]
    averages: dict[ComponentKind, ComponentScore]
    embedder_id: str
    scenario_count: int = field(default=0)

    def as_dict(self) -> dict:
        return {
            "embedder_id": self.embedder_id,
            "scenario_count": self.scenario_count,
            "averages": {
                kind.value: score.as_dict()
                for kind, score in self.averages.items()
            },
            "per_scenario": {
                sid: {
                    kind.value: score.as_dict() for kind, score in scores.items()
                }
                for sid, scores in self.per_scenario.items()
            },
        }


def score_components(
    gt: UCComponents,
    pred: UCComponents,
    embedder: Embedder,
    *,
    strict_case: bool = False,
) -> dict[ComponentKind, ComponentScore]:
    raw = raw_pipeline()
    pre = preprocessing_pipeline()
    scores: dict[ComponentKind, ComponentScore] = {}
    for kind in COMPONENT_ORDER:
        g = gt.get(kind)
        p = pred.get(kind)
        prf_raw = token_f1(g, p, raw)
        prf_pre = token_f1(g, p, pre)
        scores[kind] = ComponentScore(
            em=float(exact_match(g, p, strict_case=strict_case)),
            precision=prf_raw.precision,
            recall=prf_raw.recall,
            f1=prf_raw.f1,
            f1_pre=prf_pre.f1,
            sm=semantic_similarity(g, p, embedder),
        )
    return scores


def evaluate_corpus(
    ground_truth: Mapping[str, UCComponents],
    predictions: Mapping[str, UCComponents],
    embedder: Embedder,
    *,
    strict_case: bool = False,
) -> EvaluationReport:
    """Score every scenario and average per component, unweighted.

    The two mappings must cover exactly the same scenario ids; a mismatch
    raises :class:`IdSetMismatchError` listing the difference.
    """
    gt_ids = set(ground_truth)
    pred_ids = set(predictions)
    if gt_ids != pred_ids:
        raise IdSetMismatchError(gt_ids - pred_ids, pred_ids - gt_ids)
    if not gt_ids:
        raise ValueError("nothing to evaluate: no scenarios")

    per_scenario: dict[str, dict[ComponentKind, ComponentScore]] = {}
    for sid in sorted(gt_ids):
        per_scenario[sid] = score_components(
            ground_truth[sid], predictions[sid], embedder,
            strict_case=strict_case,
        )

    n = len(per_scenario)
    averages: dict[ComponentKind, ComponentScore] = {}
    for kind in COMPONENT_ORDER:
        averages[kind] = ComponentScore(
            em=sum(s[kind].em for s in per_scenario.values()) / n,
            precision=sum(s[kind].precision for s in per_scenario.values()) / n,
            recall=sum(s[kind].recall for s in per_scenario.values()) / n,
            f1=sum(s[kind].f1 for s in per_scenario.values()) / n,
            f1_pre=sum(s[kind].f1_pre for s in per_scenario.values()) / n,
            sm=sum(s[kind].sm for s in per_scenario.values()) / n,
        )
    return EvaluationReport(
        per_scenario=per_scenario,
        averages=averages,
        embedder_id=embedder.embedder_id,
        scenario_count=n,
    )
