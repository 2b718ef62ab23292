"""Shared vocabulary for the seven use-case components.

Every other module speaks in terms of :class:`ComponentKind` and
:class:`UCComponents`. The order of the kinds is fixed and meaningful: prompts
render definitions in this order, parsers report missing headings in this
order, and report tables keep their rows in this order.
"""
from __future__ import annotations

import enum
import re
import unicodedata
from dataclasses import dataclass, field, fields
from typing import Any, Iterator, Mapping


class ComponentKind(enum.Enum):
    """One of the seven use-case components.

    ``value`` is the snake_case field name used in files and APIs; ``label``
    is the heading used in prompts and model responses (``UC-Name`` etc).
    """

    NAME = "name"
    GOAL = "goal"
    USER = "user"
    SYSTEM = "system"
    EXTERNAL_ENTITIES = "external_entities"
    DATA_PRACTICES = "data_practices"
    STEPS = "steps"

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def from_field(cls, name: str) -> "ComponentKind":
        try:
            return cls(name)
        except ValueError:
            raise ValueError(f"unknown component field: {name!r}") from None


_LABELS = {
    ComponentKind.NAME: "UC-Name",
    ComponentKind.GOAL: "UC-Goal",
    ComponentKind.USER: "UC-User",
    ComponentKind.SYSTEM: "UC-System",
    ComponentKind.EXTERNAL_ENTITIES: "UC-ET",
    ComponentKind.DATA_PRACTICES: "UC-DPs",
    ComponentKind.STEPS: "UC-Steps",
}

COMPONENT_ORDER: tuple[ComponentKind, ...] = tuple(ComponentKind)

# Short components answer on one line, elements separated by commas; long
# components answer as one element per line. The split matters to the parser
# (comma-splitting a goal would shred legitimate clause commas) and to the
# annotation invariant checks.
SHORT_COMPONENTS = frozenset(
    {
        ComponentKind.NAME,
        ComponentKind.USER,
        ComponentKind.SYSTEM,
        ComponentKind.EXTERNAL_ENTITIES,
    }
)
LONG_COMPONENTS = frozenset(
    {ComponentKind.GOAL, ComponentKind.DATA_PRACTICES, ComponentKind.STEPS}
)

# Responses use these phrases to say "nothing found". They are compared after
# lowercasing, dropping punctuation, and collapsing whitespace, so "None.",
# "N/A", and "not  mentioned" all hit the set.
NULL_SENTINELS = frozenset(
    {
        "none",
        "not mentioned",
        "none mentioned",
        "na",
        "not applicable",
        "not specified",
    }
)

_WS_RE = re.compile(r"\s+")


def _canonical_sentinel_form(element: str) -> str:
    lowered = element.lower()
    no_punct = "".join(
        ch for ch in lowered if not unicodedata.category(ch).startswith("P")
    )
    return _WS_RE.sub(" ", no_punct).strip()


def is_null_sentinel(element: str) -> bool:
    """True when the element is a way of writing "nothing here"."""
    return _canonical_sentinel_form(element) in NULL_SENTINELS


class ComponentError(ValueError):
    """A component record violates a structural invariant."""


@dataclass
class UCComponents:
    """The seven extracted component element lists for one scenario.

    Empty lists are meaningful (no external entities found); ``None``-style
    sentinel strings are never stored as elements, they normalize to the
    empty list at parse time.
    """

    name: list[str] = field(default_factory=list)
    goal: list[str] = field(default_factory=list)
    user: list[str] = field(default_factory=list)
    system: list[str] = field(default_factory=list)
    external_entities: list[str] = field(default_factory=list)
    data_practices: list[str] = field(default_factory=list)
    steps: list[str] = field(default_factory=list)

    def get(self, kind: ComponentKind) -> list[str]:
        return getattr(self, kind.value)

    def set(self, kind: ComponentKind, elements: list[str]) -> None:
        setattr(self, kind.value, list(elements))

    def items(self) -> Iterator[tuple[ComponentKind, list[str]]]:
        for kind in COMPONENT_ORDER:
            yield kind, self.get(kind)

    def validate(self) -> None:
        """Raise :class:`ComponentError` on the first invariant violation.

        Elements must be non-empty, already trimmed, single-line, and must
        not be null sentinels (those belong normalized away, not stored).
        """
        for kind, elements in self.items():
            for i, el in enumerate(elements):
                where = f"{kind.value}[{i}]"
                if not isinstance(el, str):
                    raise ComponentError(f"{where}: element is not a string")
                if el != el.strip():
                    raise ComponentError(f"{where}: element is not trimmed: {el!r}")
                if not el:
                    raise ComponentError(f"{where}: element is empty")
                if "\n" in el or "\r" in el:
                    raise ComponentError(f"{where}: element spans multiple lines")
                if is_null_sentinel(el):
                    raise ComponentError(
                        f"{where}: null sentinel {el!r} stored as an element"
                    )

    def as_dict(self) -> dict[str, list[str]]:
        return {kind.value: list(elements) for kind, elements in self.items()}

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "UCComponents":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ComponentError(f"unknown component fields: {sorted(unknown)}")
        kwargs: dict[str, list[str]] = {}
        for name in known:
            value = raw.get(name, [])
            if not isinstance(value, list) or not all(
                isinstance(el, str) for el in value
            ):
                raise ComponentError(f"{name}: expected a list of strings")
            kwargs[name] = list(value)
        return cls(**kwargs)
