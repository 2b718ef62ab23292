"""Inspection checklist, defect records, and category sampling.

Sixteen yes/no questions probe an extraction for defects: four about
actors, two about the goal, five about data practices, and five about
steps. Each question carries a polarity: for some a "yes" answer signals a
defect (anything missing or wrong was found), for others a "no" does (a
property that should hold does not). ``DefectRecord.is_defect`` is always
derived from the answer and the polarity, never stored independently.

Records are keyed by (scenario, prompt, question, inspector) and upsert on
that key: re-answering replaces the earlier answer. A (scenario, prompt,
question) cell counts as defective when any inspector's current record
flags it.
"""
from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from uccx.corpus import Corpus


class Polarity(enum.Enum):
    DEFECT_IF_YES = "defect_if_yes"
    DEFECT_IF_NO = "defect_if_no"


@dataclass(frozen=True)
class ChecklistQuestion:
    qid: str
    category: str
    text: str
    polarity: Polarity

    def as_dict(self) -> dict:
        return {
            "qid": self.qid,
            "category": self.category,
            "text": self.text,
            "polarity": self.polarity.value,
        }


_YES = Polarity.DEFECT_IF_YES
_NO = Polarity.DEFECT_IF_NO

_QUESTIONS: tuple[ChecklistQuestion, ...] = (
    ChecklistQuestion(
        "actor.Q1", "actor",
        "Are there any actors that are not identified in the extracted "
        "UC-User, UC-System, or UC-ET components?", _YES,
    ),
    ChecklistQuestion(
        "actor.Q2", "actor",
        "Are there any incorrect actors in the extracted UC-User, UC-System, "
        "or UC-ET components?", _YES,
    ),
    ChecklistQuestion(
        "actor.Q3", "actor",
        "Considering the extracted UC-User, UC-System, UC-ET, and UC-steps, "
        "are there actors not involved in at least one of the steps?", _YES,
    ),
    ChecklistQuestion(
        "actor.Q4", "actor",
        "Considering the extracted UC-User, UC-System, UC-ET, and UC-DPs, "
        "are there actors not involved in at least one of the data "
        "practices?", _YES,
    ),
    ChecklistQuestion(
        "goal.Q1", "goal",
        "Is the right goal extracted from the scenario?", _NO,
    ),
    ChecklistQuestion(
        "goal.Q2", "goal",
        "Is the extracted UC-Goal, the goal of the UC-User (i.e., primary "
        "actor of the scenario) to be accomplished?", _NO,
    ),
    ChecklistQuestion(
        "dps.Q1", "dps",
        "Are all the data practices extracted in UC-DPs component in the "
        "system boundary (i.e., scope)?", _NO,
    ),
    ChecklistQuestion(
        "dps.Q2", "dps",
        "Should the data practice be considered a step?", _YES,
    ),
    ChecklistQuestion(
        "dps.Q3", "dps",
        "Is there any data practice in the extracted UC-DPs that does not "
        "contain a flow of personal information?", _YES,
    ),
    ChecklistQuestion(
        "dps.Q4", "dps",
        "Is it clear who is performing the action in the data practice?", _NO,
    ),
    ChecklistQuestion(
        "dps.Q5", "dps",
        "Are there any data practices that are not identified in the "
        "extracted UC-DPs?", _YES,
    ),
    ChecklistQuestion(
        "steps.Q1", "steps",
        "Are all the steps extracted in the extracted UC-Steps component in "
        "the system boundary (i.e., scope)?", _NO,
    ),
    ChecklistQuestion(
        "steps.Q2", "steps",
        "Is there any step in the extracted UC-Steps component that does "
        "not match the goal or doesn’t help accomplish the goal?", _YES,
    ),
    ChecklistQuestion(
        "steps.Q3", "steps",
        "Is it clear which actor is operating each step?", _NO,
    ),
    ChecklistQuestion(
        "steps.Q4", "steps",
        "Do the steps in the extracted UC-Steps component contain any data "
        "practices?", _YES,
    ),
    ChecklistQuestion(
        "steps.Q5", "steps",
        "Are there any steps that are not identified in the extracted "
        "UC-Steps?", _YES,
    ),
)


def builtin_checklist() -> list[ChecklistQuestion]:
    """The sixteen inspection questions, in fixed order."""
    return list(_QUESTIONS)


def question_by_id(qid: str) -> ChecklistQuestion:
    for q in _QUESTIONS:
        if q.qid == qid:
            return q
    raise KeyError(f"unknown checklist question: {qid!r}")


class DefectRecordError(ValueError):
    """A defect record references something that does not exist."""


@dataclass(frozen=True)
class DefectRecord:
    scenario_id: str
    prompt_id: str
    qid: str
    answer: str  # "yes" | "no"
    inspector_id: str
    note: str = ""

    def __post_init__(self):
        if self.answer not in ("yes", "no"):
            raise DefectRecordError(
                f"answer must be 'yes' or 'no', got {self.answer!r}"
            )

    @property
    def is_defect(self) -> bool:
        polarity = question_by_id(self.qid).polarity
        if polarity is Polarity.DEFECT_IF_YES:
            return self.answer == "yes"
        return self.answer == "no"

    def key(self) -> tuple[str, str, str, str]:
        return (self.scenario_id, self.prompt_id, self.qid, self.inspector_id)

    def as_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "prompt_id": self.prompt_id,
            "qid": self.qid,
            "answer": self.answer,
            "inspector_id": self.inspector_id,
            "note": self.note,
            "is_defect": self.is_defect,
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "DefectRecord":
        return cls(
            scenario_id=raw["scenario_id"],
            prompt_id=raw["prompt_id"],
            qid=raw["qid"],
            answer=raw["answer"],
            inspector_id=raw["inspector_id"],
            note=raw.get("note", ""),
        )


class DefectStore:
    """Upserting defect-record store with an append-friendly JSONL file.

    When a path is given, every record appends a line; loading replays the
    log in order, so the latest record per (scenario, prompt, question,
    inspector) key wins, matching the in-memory upsert.
    """

    def __init__(
        self,
        scenario_ids: Iterable[str],
        prompt_ids: Iterable[str],
        path: str | Path | None = None,
    ):
        self.scenario_ids = set(scenario_ids)
        self.prompt_ids = set(prompt_ids)
        self.path = Path(path) if path else None
        self._records: dict[tuple, DefectRecord] = {}
        if self.path and self.path.exists():
            for line in self.path.read_text("utf-8").splitlines():
                line = line.strip()
                if line:
                    rec = DefectRecord.from_dict(json.loads(line))
                    self._validate(rec)
                    self._records[rec.key()] = rec

    def _validate(self, record: DefectRecord) -> None:
        question_by_id(record.qid)  # raises KeyError on unknown qid
        if record.scenario_id not in self.scenario_ids:
            raise DefectRecordError(
                f"unknown scenario id {record.scenario_id!r}"
            )
        if record.prompt_id not in self.prompt_ids:
            raise DefectRecordError(f"unknown prompt id {record.prompt_id!r}")

    def record(self, record: DefectRecord) -> DefectRecord:
        try:
            self._validate(record)
        except KeyError as exc:
            raise DefectRecordError(str(exc)) from exc
        self._records[record.key()] = record
        if self.path:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as f:
                f.write(json.dumps(record.as_dict(), ensure_ascii=False) + "\n")
        return record

    def records(self) -> list[DefectRecord]:
        return list(self._records.values())

    def defect_summary(
        self,
        prompt_ids: Sequence[str] | None = None,
        scenario_ids: Sequence[str] | None = None,
    ) -> dict[str, dict[str, int]]:
        """Count defective scenarios per (prompt, question).

        A scenario counts for a cell when at least one inspector's current
        record flags it as a defect. Adding inspectors can only keep a cell
        or grow it, never shrink it.
        """
        prompts = list(prompt_ids) if prompt_ids is not None else sorted(
            {r.prompt_id for r in self._records.values()}
        )
        scenario_filter = set(scenario_ids) if scenario_ids is not None else None
        flagged: dict[tuple[str, str], set[str]] = {}
        for rec in self._records.values():
            if rec.prompt_id not in prompts:
                continue
            if scenario_filter is not None and rec.scenario_id not in scenario_filter:
                continue
            if rec.is_defect:
                flagged.setdefault((rec.prompt_id, rec.qid), set()).add(
                    rec.scenario_id
                )
        summary: dict[str, dict[str, int]] = {}
        for prompt in prompts:
            summary[prompt] = {
                q.qid: len(flagged.get((prompt, q.qid), set()))
                for q in _QUESTIONS
            }
        return summary


def sample_by_category(corpus: Corpus, seed: int) -> list[str]:
    """One uniformly chosen scenario id per distinct category label.

    Categories merge across platforms: "Sports" on either store is one
    category. The same seed over the same corpus always returns the same
    ids, ordered by category label.
    """
    if len(corpus) == 0:
        raise ValueError("cannot sample from an empty corpus")
    by_category: dict[str, list[str]] = {}
    for s in corpus:
        by_category.setdefault(s.category, []).append(s.id)
    rng = random.Random(seed)
    chosen: list[str] = []
    for category in sorted(by_category):
        chosen.append(rng.choice(sorted(by_category[category])))
    return chosen
