"""Parsing free-text model answers into the seven component lists.

Chat models answer in many near-miss layouts: headings in different case or
with the long alias (``UC-ExternalEntities``), elements as dashes, stars,
numbered lists, or comma runs on the heading line, "None"/"Not Mentioned"
sentinels for empty slots, and sometimes the data practices arrive as
Key: value dictionaries. ``parse_response`` is total: any input produces a
:class:`ParseReport` with whatever could be recovered plus warnings for what
could not; it never raises on content.

Comma splitting applies only to the short components (name, user, system,
external entities). Goals, data practices, and steps keep their commas:
"collects my name, age, and history" is one data practice, not three.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from uccx.components import (
    COMPONENT_ORDER,
    SHORT_COMPONENTS,
    ComponentKind,
    UCComponents,
    is_null_sentinel,
)


class WarningKind(enum.Enum):
    MISSING_HEADING = "MISSING_HEADING"
    NULL_SENTINEL_NORMALIZED = "NULL_SENTINEL_NORMALIZED"
    DICT_FORMAT_FLATTENED = "DICT_FORMAT_FLATTENED"
    UNPARSED_TRAILING_TEXT = "UNPARSED_TRAILING_TEXT"


@dataclass(frozen=True)
class ParseWarning:
    kind: WarningKind
    detail: str

    def as_dict(self) -> dict:
        return {"kind": self.kind.value, "detail": self.detail}


@dataclass
class ParseReport:
    components: UCComponents
    warnings: list[ParseWarning] = field(default_factory=list)

    def warning_kinds(self) -> set[WarningKind]:
        return {w.kind for w in self.warnings}


_HEADING_ALIASES = {
    "name": ComponentKind.NAME,
    "goal": ComponentKind.GOAL,
    "user": ComponentKind.USER,
    "system": ComponentKind.SYSTEM,
    "et": ComponentKind.EXTERNAL_ENTITIES,
    "externalentities": ComponentKind.EXTERNAL_ENTITIES,
    "dps": ComponentKind.DATA_PRACTICES,
    "datapractices": ComponentKind.DATA_PRACTICES,
    "steps": ComponentKind.STEPS,
}

# A heading is "UC-<word>" at the start of a line, optionally wrapped in
# markdown bold, with an optional colon. Lines that start with a bullet or a
# number are elements, never headings, so list items that happen to contain
# "UC-" survive round trips.
_BOLD_HEADING_RE = re.compile(
    r"^\s*(\*\*|__)\s*UC-([A-Za-z]+)\s*:?\s*\1\s*:?\s*(.*?)\s*$",
    re.IGNORECASE,
)
_HEADING_RE = re.compile(
    r"^\s*UC-([A-Za-z]+)\s*(?:\*\*|__)?\s*:?\s*(.*?)\s*$",
    re.IGNORECASE,
)
_BULLET_RE = re.compile(r"^\s*(?:[-*•]\s+|\d{1,3}[.)]\s+)(.*?)\s*$")
_QUOTE_PAIRS = {('"', '"'), ("'", "'"), ("“", "”"), ("‘", "’")}

_DICT_KEYS = {
    "data sharing": 0,
    "data action": 1,
    "data element": 2,
    "data purpose": 3,
}
_DICT_LINE_RE = re.compile(
    r"^\s*(data\s+(?:sharing|action|element|purpose))\s*:\s*(.+?)\s*$",
    re.IGNORECASE,
)


def _strip_wrapping_quotes(element: str) -> str:
    while len(element) >= 2 and (element[0], element[-1]) in _QUOTE_PAIRS:
        element = element[1:-1].strip()
    return element


def _clean_element(raw: str) -> str:
    return _strip_wrapping_quotes(raw.strip()).strip()


def normalize_empty(elements: list[str]) -> list[str]:
    """Drop the ways a model writes "nothing here" from an element list.

    "None", "Not Mentioned", "None Mentioned", "N/A", "Not applicable", and
    "Not specified" (any case, with or without trailing punctuation) all
    vanish; real elements survive untouched.
    """
    return [el for el in elements if not is_null_sentinel(el)]


def flatten_dict_format(region_lines: list[str]) -> list[str]:
    """Rebuild data practices answered as Key: value dictionaries.

    Recognized keys are Data Sharing, Data Action, Data Element, and Data
    Purpose. Consecutive key lines form one group; a key repeating starts
    the next group. Each group becomes one element with its values joined
    in sharing-actor, action, element, purpose order. Lines with no
    recognized key pass through verbatim, so non-dictionary regions come
    back unchanged.
    """
    out: list[str] = []
    group: dict[int, str] = {}

    def flush():
        if group:
            out.append(" ".join(group[i] for i in sorted(group)))
            group.clear()

    for line in region_lines:
        m = _DICT_LINE_RE.match(line)
        if not m:
            flush()
            out.append(line)
            continue
        slot = _DICT_KEYS[re.sub(r"\s+", " ", m.group(1).lower())]
        if slot in group:
            flush()
        group[slot] = m.group(2)
    flush()
    return out


def _match_heading(line: str) -> tuple[ComponentKind | None, str] | None:
    """Return (kind, inline content) for a heading line.

    ``kind`` is None for an unknown ``UC-`` heading. Non-heading lines
    return None.
    """
    if _BULLET_RE.match(line):
        return None
    m = _BOLD_HEADING_RE.match(line)
    if m:
        return _HEADING_ALIASES.get(m.group(2).lower()), m.group(3)
    m = _HEADING_RE.match(line)
    if not m:
        return None
    kind = _HEADING_ALIASES.get(m.group(1).lower())
    return kind, m.group(2)


def parse_response(text: str) -> ParseReport:
    """Parse a model answer. Total: never raises on response content."""
    warnings: list[ParseWarning] = []
    regions: dict[ComponentKind, list[str]] = {}
    current: ComponentKind | None = None

    for line in text.splitlines():
        heading = _match_heading(line)
        if heading is not None:
            kind, inline = heading
            if kind is None:
                warnings.append(
                    ParseWarning(
                        WarningKind.UNPARSED_TRAILING_TEXT,
                        f"unknown heading ignored: {line.strip()!r}",
                    )
                )
                current = None
                continue
            regions.setdefault(kind, [])
            current = kind
            if inline:
                regions[kind].append(inline)
            continue
        if current is not None and line.strip():
            regions[current].append(line)

    components = UCComponents()
    for kind in COMPONENT_ORDER:
        if kind not in regions:
            warnings.append(
                ParseWarning(
                    WarningKind.MISSING_HEADING,
                    f"no {kind.label} heading in the response",
                )
            )
            continue
        elements, region_warnings = _parse_region(kind, regions[kind])
        components.set(kind, elements)
        warnings.extend(region_warnings)

    return ParseReport(components=components, warnings=warnings)


def _parse_region(
    kind: ComponentKind, lines: list[str]
) -> tuple[list[str], list[ParseWarning]]:
    warnings: list[ParseWarning] = []

    # Bullet markers come off first; remember which lines carried one,
    # because an un-bulleted line in a short component is a comma run while
    # a bulleted line is always exactly one element.
    contents: list[str] = []
    bulleted: list[bool] = []
    for line in lines:
        m = _BULLET_RE.match(line)
        contents.append(m.group(1) if m else line.strip())
        bulleted.append(m is not None)

    raw_elements: list[str] = []
    if kind in SHORT_COMPONENTS:
        for content, was_bulleted in zip(contents, bulleted):
            if was_bulleted:
                raw_elements.append(content)
            else:
                raw_elements.extend(content.split(","))
    else:
        if kind is ComponentKind.DATA_PRACTICES and any(
            _DICT_LINE_RE.match(c) for c in contents
        ):
            contents = flatten_dict_format(contents)
            warnings.append(
                ParseWarning(
                    WarningKind.DICT_FORMAT_FLATTENED,
                    f"{kind.label} answered as key/value pairs; "
                    f"reassembled {len(contents)} element(s)",
                )
            )
        raw_elements = list(contents)

    elements = [el for el in (_clean_element(e) for e in raw_elements) if el]
    normalized = normalize_empty(elements)
    if len(normalized) != len(elements):
        warnings.append(
            ParseWarning(
                WarningKind.NULL_SENTINEL_NORMALIZED,
                f"{kind.label}: dropped "
                f"{len(elements) - len(normalized)} empty-slot sentinel(s)",
            )
        )
    return normalized, warnings
