"""Span annotations, inter-annotator agreement, and adjudication.

Annotators mark character ranges of a scenario text with one of the seven
component kinds. Offsets count Unicode scalar values. Two spans of the same
component may never overlap within one annotator's set; spans of different
components may (a name sitting inside a goal is normal and expected).

Agreement is Fleiss' kappa computed at the token level: for each component,
every whitespace token of every scenario is an item, and each annotator rates
it IN (some span of that component overlaps the token) or OUT. Adjudication
merges the annotators' views by strict token majority and rebuilds spans from
maximal contiguous runs of majority tokens.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from uccx.components import ComponentKind, UCComponents
from uccx.corpus import Scenario


class AnnotationError(ValueError):
    """An annotation record is structurally invalid for its scenario."""


@dataclass(frozen=True)
class Span:
    """One labeled character range. ``text`` is the exact substring covered."""

    start: int
    end: int
    component: ComponentKind
    text: str

    def __post_init__(self):
        if self.start < 0 or self.end <= self.start:
            raise AnnotationError(
                f"span [{self.start}, {self.end}) is not a forward range"
            )

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end

    def as_dict(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "component": self.component.value,
            "text": self.text,
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "Span":
        return cls(
            start=raw["start"],
            end=raw["end"],
            component=ComponentKind.from_field(raw["component"]),
            text=raw["text"],
        )


@dataclass
class AnnotationSet:
    """All spans one annotator placed on one scenario."""

    scenario_id: str
    annotator_id: str
    spans: list[Span] = field(default_factory=list)

    def __post_init__(self):
        _check_same_component_overlap(self.spans)

    def spans_of(self, kind: ComponentKind) -> list[Span]:
        return sorted(
            (s for s in self.spans if s.component is kind),
            key=lambda s: (s.start, s.end),
        )

    def as_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "annotator_id": self.annotator_id,
            "spans": [s.as_dict() for s in self.spans],
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "AnnotationSet":
        return cls(
            scenario_id=raw["scenario_id"],
            annotator_id=raw["annotator_id"],
            spans=[Span.from_dict(s) for s in raw["spans"]],
        )


def _check_same_component_overlap(spans: Sequence[Span]) -> None:
    by_kind: dict[ComponentKind, list[Span]] = {}
    for s in spans:
        by_kind.setdefault(s.component, []).append(s)
    for kind, group in by_kind.items():
        group = sorted(group, key=lambda s: (s.start, s.end))
        for a, b in zip(group, group[1:]):
            if a.overlaps(b):
                raise AnnotationError(
                    f"{kind.value} spans [{a.start}, {a.end}) and "
                    f"[{b.start}, {b.end}) overlap; same-component spans "
                    "must be disjoint"
                )


def validate_annotation_set(scenario: Scenario, aset: AnnotationSet) -> None:
    """Check offsets and span texts against the scenario.

    Raises :class:`AnnotationError` naming the first failing span. The
    same-component overlap rule is already enforced at construction.
    """
    if aset.scenario_id != scenario.id:
        raise AnnotationError(
            f"annotation set is for {aset.scenario_id!r}, not {scenario.id!r}"
        )
    n = len(scenario.text)
    for i, span in enumerate(aset.spans):
        if span.end > n:
            raise AnnotationError(
                f"span {i} [{span.start}, {span.end}) runs past the end of "
                f"the text (length {n})"
            )
        actual = scenario.text[span.start : span.end]
        if span.text != actual:
            raise AnnotationError(
                f"span {i} text mismatch: recorded {span.text!r}, "
                f"text at [{span.start}, {span.end}) is {actual!r}"
            )


@dataclass(frozen=True)
class AnnotationLint:
    code: str
    annotator_id: str
    detail: str


def annotation_lints(aset: AnnotationSet) -> list[AnnotationLint]:
    """Advisory checks on one annotator's spans.

    The only machine-checkable guideline is that steps and data practices are
    not part of the goal: a goal span overlapping a step or data-practice
    span of the same annotator draws a GOAL_OVERLAPS_STEP_OR_DP warning (the
    H9 rule). A name span inside a goal span is expected and never flagged.
    """
    lints: list[AnnotationLint] = []
    goals = aset.spans_of(ComponentKind.GOAL)
    others = aset.spans_of(ComponentKind.STEPS) + aset.spans_of(
        ComponentKind.DATA_PRACTICES
    )
    for g in goals:
        for o in others:
            if g.overlaps(o):
                lints.append(
                    AnnotationLint(
                        code="GOAL_OVERLAPS_STEP_OR_DP",
                        annotator_id=aset.annotator_id,
                        detail=(
                            f"goal span [{g.start}, {g.end}) overlaps "
                            f"{o.component.value} span [{o.start}, {o.end}); "
                            "steps and data practices are not part of the goal"
                        ),
                    )
                )
    return lints


@dataclass
class GroundTruth:
    """Reference components for one scenario, with how they were produced."""

    scenario_id: str
    components: UCComponents
    source: str = "adjudicated"

    def as_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "source": self.source,
            "components": self.components.as_dict(),
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "GroundTruth":
        return cls(
            scenario_id=raw["scenario_id"],
            components=UCComponents.from_dict(raw["components"]),
            source=raw.get("source", "adjudicated"),
        )


def spans_to_components(scenario: Scenario, aset: AnnotationSet) -> UCComponents:
    """Convert one annotator's spans to component element lists.

    Elements keep document order within each component; identical texts
    labeled at different offsets stay as separate elements.
    """
    validate_annotation_set(scenario, aset)
    components = UCComponents()
    for kind in ComponentKind:
        components.set(kind, [s.text for s in aset.spans_of(kind)])
    return components


# --- token-level agreement ----------------------------------------------


def token_ranges(text: str) -> list[tuple[int, int]]:
    """Character ranges of the whitespace tokens of ``text``, in order."""
    ranges = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        ranges.append((i, j))
        i = j
    return ranges


def _token_in(span_list: Sequence[Span], start: int, end: int) -> bool:
    return any(s.start < end and start < s.end for s in span_list)


def fleiss_kappa(
    scenarios: Sequence[Scenario],
    annotations: Sequence[AnnotationSet],
    component: ComponentKind,
) -> float:
    """Fleiss' kappa over token-level IN/OUT ratings for one component.

    Every scenario must carry the same number of annotation sets, at least
    two. Perfect agreement returns 1.0 even in the degenerate case where
    every rating lands in one category (expected agreement 1 makes the
    usual formula 0/0).
    """
    by_scenario: dict[str, list[AnnotationSet]] = {s.id: [] for s in scenarios}
    for aset in annotations:
        if aset.scenario_id in by_scenario:
            by_scenario[aset.scenario_id].append(aset)
    counts = {sid: len(asets) for sid, asets in by_scenario.items()}
    distinct = set(counts.values())
    if len(distinct) != 1:
        raise AnnotationError(
            f"annotator counts differ across scenarios: {counts}"
        )
    n_raters = distinct.pop()
    if n_raters < 2:
        raise AnnotationError(
            f"agreement needs at least 2 annotators per scenario, got {n_raters}"
        )

    items: list[int] = []  # IN-count per token
    for scenario in scenarios:
        ranges = token_ranges(scenario.text)
        if not ranges:
            raise AnnotationError(f"scenario {scenario.id!r} has no tokens")
        per_annotator = [
            aset.spans_of(component) for aset in by_scenario[scenario.id]
        ]
        for start, end in ranges:
            items.append(sum(_token_in(spans, start, end) for spans in per_annotator))

    n_items = len(items)
    total = n_items * n_raters
    in_total = sum(items)
    p_in = in_total / total
    p_out = 1.0 - p_in
    p_expected = p_in * p_in + p_out * p_out

    agree_sum = 0.0
    for k_in in items:
        k_out = n_raters - k_in
        agree_sum += (k_in * (k_in - 1) + k_out * (k_out - 1)) / (
            n_raters * (n_raters - 1)
        )
    p_observed = agree_sum / n_items

    if p_expected >= 1.0:
        return 1.0
    return (p_observed - p_expected) / (1.0 - p_expected)


KAPPA_BANDS = (
    (-1.0, "poor"),
    (0.0, "slight"),
    (0.21, "fair"),
    (0.41, "moderate"),
    (0.61, "substantial"),
    (0.81, "almost perfect"),
)


def kappa_band(kappa: float) -> str:
    """Landis and Koch agreement band for a kappa value."""
    label = KAPPA_BANDS[0][1]
    for threshold, name in KAPPA_BANDS:
        if kappa >= threshold:
            label = name
    return label


# --- adjudication ---------------------------------------------------------


def majority_spans(
    scenario: Scenario, annotations: Sequence[AnnotationSet]
) -> list[Span]:
    """Merge annotators' spans by strict token majority.

    A token makes the merged view of a component when more than half of the
    annotators cover it with a span of that component. Maximal contiguous
    runs of such tokens become merged spans. Merged spans therefore snap to
    token boundaries, and adjacent majority runs fuse into one span.
    """
    if len(annotations) < 2:
        raise AnnotationError(
            f"adjudication needs at least 2 annotation sets, got {len(annotations)}"
        )
    for aset in annotations:
        validate_annotation_set(scenario, aset)
    ranges = token_ranges(scenario.text)
    n = len(annotations)
    merged: list[Span] = []
    for kind in ComponentKind:
        per_annotator = [aset.spans_of(kind) for aset in annotations]
        majority = [
            sum(_token_in(spans, start, end) for spans in per_annotator) * 2 > n
            for start, end in ranges
        ]
        i = 0
        while i < len(ranges):
            if not majority[i]:
                i += 1
                continue
            j = i
            while j + 1 < len(ranges) and majority[j + 1]:
                j += 1
            start = ranges[i][0]
            end = ranges[j][1]
            merged.append(
                Span(start, end, kind, scenario.text[start:end])
            )
            i = j + 1
    return merged


def adjudicate(
    scenario: Scenario, annotations: Sequence[AnnotationSet]
) -> GroundTruth:
    """Produce adjudicated ground truth from two or more annotation sets."""
    spans = majority_spans(scenario, annotations)
    merged_set = AnnotationSet(
        scenario_id=scenario.id, annotator_id="adjudicated", spans=spans
    )
    components = spans_to_components(scenario, merged_set)
    return GroundTruth(
        scenario_id=scenario.id, components=components, source="adjudicated"
    )


# --- file I/O --------------------------------------------------------------


def load_annotations(path: str | Path) -> list[AnnotationSet]:
    doc = json.loads(Path(path).read_text("utf-8"))
    if not isinstance(doc, list):
        raise AnnotationError("annotation file must be a JSON list")
    return [AnnotationSet.from_dict(rec) for rec in doc]


def save_annotations(annotations: Iterable[AnnotationSet], path: str | Path) -> None:
    doc = [a.as_dict() for a in annotations]
    Path(path).write_text(
        json.dumps(doc, indent=2, ensure_ascii=False) + "\n", "utf-8"
    )


def load_ground_truth(path: str | Path) -> dict[str, GroundTruth]:
    """Load a ground-truth file as a mapping from scenario id."""
    doc = json.loads(Path(path).read_text("utf-8"))
    if not isinstance(doc, list):
        raise AnnotationError("ground-truth file must be a JSON list")
    out: dict[str, GroundTruth] = {}
    for rec in doc:
        gt = GroundTruth.from_dict(rec)
        gt.components.validate()
        if gt.scenario_id in out:
            raise AnnotationError(f"duplicate ground truth for {gt.scenario_id!r}")
        out[gt.scenario_id] = gt
    return out


def save_ground_truth(records: Iterable[GroundTruth], path: str | Path) -> None:
    doc = [gt.as_dict() for gt in records]
    Path(path).write_text(
        json.dumps(doc, indent=2, ensure_ascii=False) + "\n", "utf-8"
    )


def sample_ground_truth_path() -> Path:
    """Path of the adjudicated ground truth for the bundled sample corpus."""
    return Path(str(resources.files("uccx").joinpath("data/sample_ground_truth.json")))


def sample_annotations_path() -> Path:
    """Path of the bundled example annotation sets (three annotators, s01)."""
    return Path(str(resources.files("uccx").joinpath("data/sample_annotations.json")))
