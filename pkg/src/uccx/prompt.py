"""Prompt presets and deterministic prompt rendering.

A preset is data, not code: an id, a preamble, a response instruction, and
one definition (plus optional examples) per component, in the fixed
component order. The three bundled presets are:

* ``seed`` -- the concise definitions used on the first extraction pass,
* ``refined`` -- the same preset with the data-practice and step
  definitions rewritten to spell out what those components mean, and
* ``refined_with_examples`` -- the refined definitions with five worked
  examples attached to each of the two rewritten components.

Rendering is pure string assembly: same preset and scenario in, same prompt
out, no timestamps and no randomness.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping

from uccx.components import COMPONENT_ORDER, ComponentKind
from uccx.corpus import Scenario


class PresetError(ValueError):
    """A preset file or record is malformed."""


@dataclass(frozen=True)
class ComponentDefinition:
    component: ComponentKind
    definition: str
    examples: tuple[str, ...] = ()

    def render(self) -> str:
        line = f"{self.component.label}: {self.definition}"
        if self.examples:
            quoted = " ".join(f'"{ex},"' for ex in self.examples[:-1])
            quoted = (quoted + " " if quoted else "") + f'"{self.examples[-1]}."'
            line += f" For example: {quoted}"
        return line


@dataclass(frozen=True)
class PromptPreset:
    id: str
    preamble: str
    response_instruction: str
    definitions: tuple[ComponentDefinition, ...]

    def __post_init__(self):
        kinds = [d.component for d in self.definitions]
        if kinds != list(COMPONENT_ORDER):
            raise PresetError(
                f"preset {self.id!r} must define all 7 components in order, "
                f"got {[k.value for k in kinds]}"
            )

    def definition_for(self, kind: ComponentKind) -> ComponentDefinition:
        for d in self.definitions:
            if d.component is kind:
                return d
        raise KeyError(kind)

    @classmethod
    def from_dict(cls, raw: Mapping) -> "PromptPreset":
        try:
            defs = tuple(
                ComponentDefinition(
                    component=ComponentKind.from_field(d["component"]),
                    definition=d["definition"],
                    examples=tuple(d.get("examples", ())),
                )
                for d in raw["definitions"]
            )
            return cls(
                id=raw["id"],
                preamble=raw["preamble"],
                response_instruction=raw["response_instruction"],
                definitions=defs,
            )
        except KeyError as exc:
            raise PresetError(f"preset record missing key: {exc}") from exc


def render(preset: PromptPreset, scenario: Scenario) -> str:
    """Assemble the full prompt for one scenario.

    Layout: preamble, blank line, the seven definition lines (each starting
    with its ``UC-`` label), blank line, the response instruction, blank
    line, and the scenario paragraph. Nothing outside the seven definition
    lines starts with ``UC-``, so the definition block is unambiguous.
    """
    lines = [preset.preamble, ""]
    lines.extend(d.render() for d in preset.definitions)
    lines.extend(["", preset.response_instruction, ""])
    lines.append(f"Paragraph: {scenario.text}")
    return "\n".join(lines)


@lru_cache(maxsize=1)
def builtin_presets() -> dict[str, PromptPreset]:
    """The bundled presets, keyed by id, loaded from package data."""
    raw = resources.files("uccx").joinpath("data/presets.json").read_text("utf-8")
    presets = _parse_preset_doc(json.loads(raw))
    expected = {"seed", "refined", "refined_with_examples"}
    if set(presets) != expected:
        raise PresetError(
            f"bundled preset file must define exactly {sorted(expected)}, "
            f"got {sorted(presets)}"
        )
    return presets


def load_presets(path: str | Path) -> dict[str, PromptPreset]:
    """Load a user preset file (same format as the bundled one)."""
    return _parse_preset_doc(json.loads(Path(path).read_text("utf-8")))


def _parse_preset_doc(doc) -> dict[str, PromptPreset]:
    if not isinstance(doc, list):
        raise PresetError("preset file must be a JSON list of preset records")
    presets: dict[str, PromptPreset] = {}
    for rec in doc:
        preset = PromptPreset.from_dict(rec)
        if preset.id in presets:
            raise PresetError(f"duplicate preset id {preset.id!r}")
        presets[preset.id] = preset
    return presets
