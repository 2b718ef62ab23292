"""Scenario corpus loading, schema validation, and quality lints.

A corpus file is one JSON document: a list of scenario records with exactly
the fields of :class:`Scenario`, snake_case, UTF-8. The formal schema ships
with the package (``data/schemas/corpus.schema.json``) and `load_corpus`
validates every record against it before constructing anything.

Lints are advisory: scenarios written against the collection instructions
should be at least 150 words, carry a screen title, and declare three
information types, but a corpus that misses those still loads.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterator, Mapping, Sequence

import jsonschema

from uccx.text import word_count

REQUIRED_INFO_TYPES = 3
MIN_WORDS = 150


class Platform(enum.Enum):
    APPLE = "apple"
    GOOGLE = "google"


class CorpusSchemaError(ValueError):
    """A corpus document failed schema validation.

    Carries the index of the offending record (or None for document-level
    problems) and the field that failed, so callers can point at the exact
    spot in the file.
    """

    def __init__(self, message: str, *, record_index: int | None = None,
                 field: str | None = None):
        super().__init__(message)
        self.record_index = record_index
        self.field = field


@dataclass(frozen=True)
class Scenario:
    """One first-person description of reaching a goal in a mobile app."""

    id: str
    app_name: str
    store_url: str
    platform: Platform
    category: str
    screen_title: str
    text: str
    author_declared_info_types: tuple[str, ...] = ()


@dataclass
class Corpus:
    scenarios: list[Scenario] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.scenarios)

    def __iter__(self) -> Iterator[Scenario]:
        return iter(self.scenarios)

    def get(self, scenario_id: str) -> Scenario:
        for s in self.scenarios:
            if s.id == scenario_id:
                return s
        raise KeyError(scenario_id)

    def ids(self) -> list[str]:
        return [s.id for s in self.scenarios]


class LintCode(enum.Enum):
    WORD_COUNT_BELOW_150 = "WORD_COUNT_BELOW_150"
    EMPTY_SCREEN_TITLE = "EMPTY_SCREEN_TITLE"
    INFO_TYPES_INCOMPLETE = "INFO_TYPES_INCOMPLETE"


@dataclass(frozen=True)
class Lint:
    code: LintCode
    scenario_id: str
    detail: str


def _corpus_schema() -> dict:
    raw = resources.files("uccx").joinpath(
        "data/schemas/corpus.schema.json"
    ).read_text("utf-8")
    return json.loads(raw)


def load_corpus(path: str | Path) -> Corpus:
    """Load and validate a corpus file.

    Raises :class:`CorpusSchemaError` naming the record index and field on
    the first violation, including duplicate scenario ids (reported at the
    second occurrence).
    """
    try:
        doc = json.loads(Path(path).read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusSchemaError(f"not valid JSON: {exc}") from exc

    validator = jsonschema.Draft202012Validator(_corpus_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path_parts = list(err.absolute_path)
        record_index = path_parts[0] if path_parts and isinstance(path_parts[0], int) else None
        fld = next((p for p in path_parts[1:] if isinstance(p, str)), None)
        if fld is None and err.validator == "required":
            # "'x' is a required property" -- pull the field out of the message
            fld = err.message.split("'")[1] if "'" in err.message else None
        where = "document" if record_index is None else f"record {record_index}"
        if fld:
            where += f", field {fld!r}"
        raise CorpusSchemaError(
            f"corpus schema violation at {where}: {err.message}",
            record_index=record_index,
            field=fld,
        )

    seen: dict[str, int] = {}
    scenarios: list[Scenario] = []
    for i, rec in enumerate(doc):
        sid = rec["id"]
        if sid in seen:
            raise CorpusSchemaError(
                f"corpus schema violation at record {i}, field 'id': "
                f"duplicate scenario id {sid!r} (first seen at record {seen[sid]})",
                record_index=i,
                field="id",
            )
        seen[sid] = i
        scenarios.append(
            Scenario(
                id=sid,
                app_name=rec["app_name"],
                store_url=rec["store_url"],
                platform=Platform(rec["platform"]),
                category=rec["category"],
                screen_title=rec["screen_title"],
                text=rec["text"],
                author_declared_info_types=tuple(rec["author_declared_info_types"]),
            )
        )
    return Corpus(scenarios)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    records = [
        {
            "id": s.id,
            "app_name": s.app_name,
            "store_url": s.store_url,
            "platform": s.platform.value,
            "category": s.category,
            "screen_title": s.screen_title,
            "text": s.text,
            "author_declared_info_types": list(s.author_declared_info_types),
        }
        for s in corpus
    ]
    Path(path).write_text(
        json.dumps(records, indent=2, ensure_ascii=False) + "\n", "utf-8"
    )


def validate_scenario(scenario: Scenario) -> list[Lint]:
    """Check one scenario against the collection instructions."""
    lints: list[Lint] = []
    n = word_count(scenario.text)
    if n < MIN_WORDS:
        lints.append(
            Lint(
                LintCode.WORD_COUNT_BELOW_150,
                scenario.id,
                f"text has {n} words, expected at least {MIN_WORDS}",
            )
        )
    if not scenario.screen_title.strip():
        lints.append(
            Lint(LintCode.EMPTY_SCREEN_TITLE, scenario.id, "screen_title is empty")
        )
    if len(scenario.author_declared_info_types) < REQUIRED_INFO_TYPES:
        lints.append(
            Lint(
                LintCode.INFO_TYPES_INCOMPLETE,
                scenario.id,
                f"{len(scenario.author_declared_info_types)} information types "
                f"declared, expected {REQUIRED_INFO_TYPES}",
            )
        )
    return lints


def validate_corpus(corpus: Corpus) -> list[Lint]:
    lints: list[Lint] = []
    for s in corpus:
        lints.extend(validate_scenario(s))
    return lints


@dataclass
class CategoryFrequency:
    """Scenario counts per (category, platform), plus per-platform totals."""

    counts: dict[tuple[str, Platform], int]
    totals: dict[Platform, int]

    def categories(self) -> list[str]:
        return sorted({cat for cat, _ in self.counts})


def category_frequency(corpus: Corpus | Sequence[Scenario]) -> CategoryFrequency:
    counts: dict[tuple[str, Platform], int] = {}
    totals: dict[Platform, int] = {p: 0 for p in Platform}
    for s in corpus:
        key = (s.category, s.platform)
        counts[key] = counts.get(key, 0) + 1
        totals[s.platform] += 1
    return CategoryFrequency(counts=counts, totals=totals)


def sample_corpus_path() -> Path:
    """Path of the bundled 16-scenario sample corpus."""
    return Path(str(resources.files("uccx").joinpath("data/sample_corpus.json")))
