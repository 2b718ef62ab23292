"""Run directories: manifests, predictions, and integrity checks.

Every extraction run lives in its own directory under a runs root:

    runs/<run_id>/
        manifest.json      what produced the run (corpus digest, preset, model)
        predictions.json   one extracted component set per scenario
        metrics.csv        written by evaluation, one row per component
        metrics.json       full evaluation report
        defects.jsonl      inspection answers recorded against this run

The manifest pins the corpus by SHA-256 so stale runs are detectable after
the corpus changes. ``fsck`` walks a runs root and reports anything broken
or out of date without modifying it.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping

from uccx import __version__
from uccx.components import UCComponents


class RunError(ValueError):
    """A run artifact is missing, malformed, or inconsistent."""


def corpus_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass(frozen=True)
class RunManifest:
    run_id: str
    corpus_path: str
    corpus_sha256: str
    preset_id: str
    model_id: str
    temperature: float
    provider_id: str
    created_at: str = field(default_factory=_now_iso)
    tool_version: str = __version__

    def as_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "corpus_path": self.corpus_path,
            "corpus_sha256": self.corpus_sha256,
            "preset_id": self.preset_id,
            "model_id": self.model_id,
            "temperature": self.temperature,
            "provider_id": self.provider_id,
            "created_at": self.created_at,
            "tool_version": self.tool_version,
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "RunManifest":
        try:
            return cls(
                run_id=raw["run_id"],
                corpus_path=raw["corpus_path"],
                corpus_sha256=raw["corpus_sha256"],
                preset_id=raw["preset_id"],
                model_id=raw["model_id"],
                temperature=raw["temperature"],
                provider_id=raw["provider_id"],
                created_at=raw["created_at"],
                tool_version=raw.get("tool_version", "unknown"),
            )
        except KeyError as exc:
            raise RunError(f"manifest missing field {exc.args[0]!r}") from exc


@dataclass(frozen=True)
class Prediction:
    scenario_id: str
    components: UCComponents
    warnings: tuple[dict, ...] = ()

    def as_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "components": self.components.as_dict(),
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "Prediction":
        return cls(
            scenario_id=raw["scenario_id"],
            components=UCComponents.from_dict(raw["components"]),
            warnings=tuple(raw.get("warnings", [])),
        )


@dataclass
class PredictionSet:
    run_id: str
    predictions: list[Prediction]
    incomplete: bool = False

    def by_id(self) -> dict[str, UCComponents]:
        return {p.scenario_id: p.components for p in self.predictions}

    def as_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "incomplete": self.incomplete,
            "predictions": [p.as_dict() for p in self.predictions],
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "PredictionSet":
        try:
            preds = [Prediction.from_dict(p) for p in raw["predictions"]]
            return cls(
                run_id=raw["run_id"],
                predictions=preds,
                incomplete=bool(raw.get("incomplete", False)),
            )
        except KeyError as exc:
            raise RunError(
                f"predictions file missing field {exc.args[0]!r}"
            ) from exc


def run_dir(runs_root: str | Path, run_id: str) -> Path:
    return Path(runs_root) / run_id


def save_manifest(runs_root: str | Path, manifest: RunManifest) -> Path:
    d = run_dir(runs_root, manifest.run_id)
    d.mkdir(parents=True, exist_ok=True)
    path = d / "manifest.json"
    path.write_text(
        json.dumps(manifest.as_dict(), indent=2, ensure_ascii=False) + "\n",
        "utf-8",
    )
    return path

def load_manifest(runs_root: str | Path, run_id: str) -> RunManifest:
    path = run_dir(runs_root, run_id) / "manifest.json"
    if not path.exists():
        raise RunError(f"run {run_id!r} has no manifest.json")
    try:
        raw = json.loads(path.read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise RunError(f"manifest.json for run {run_id!r} is not valid JSON: {exc}") from exc
    return RunManifest.from_dict(raw)


def save_predictions(runs_root: str | Path, preds: PredictionSet) -> Path:
    d = run_dir(runs_root, preds.run_id)
    d.mkdir(parents=True, exist_ok=True)
    path = d / "predictions.json"
    path.write_text(
        json.dumps(preds.as_dict(), indent=2, ensure_ascii=False) + "\n",
        "utf-8",
    )
    return path


def load_predictions(runs_root: str | Path, run_id: str) -> PredictionSet:
    path = run_dir(runs_root, run_id) / "predictions.json"
    if not path.exists():
        raise RunError(f"run {run_id!r} has no predictions.json")
    try:
        raw = json.loads(path.read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise RunError(
            f"predictions.json for run {run_id!r} is not valid JSON: {exc}"
        ) from exc
    preds = PredictionSet.from_dict(raw)
    if preds.run_id != run_id:
        raise RunError(
            f"predictions.json in runs/{run_id} claims run_id {preds.run_id!r}"
        )
    return preds


def list_runs(runs_root: str | Path) -> list[str]:
    root = Path(runs_root)
    if not root.exists():
        return []
    return sorted(p.name for p in root.iterdir() if p.is_dir())


@dataclass(frozen=True)
class FsckFinding:
    run_id: str
    severity: str  # "error" | "warning"
    message: str


def fsck(runs_root: str | Path) -> list[FsckFinding]:
    """Check every run directory for structural problems.

    Errors: missing or unreadable manifest/predictions, run_id mismatches,
    duplicate scenario ids within a predictions file. Warnings: corpus file
    moved or changed since the run, incomplete prediction sets.
    """
    findings: list[FsckFinding] = []
    for run_id in list_runs(runs_root):
        try:
            manifest = load_manifest(runs_root, run_id)
        except RunError as exc:
            findings.append(FsckFinding(run_id, "error", str(exc)))
            manifest = None
        if manifest is not None:
            if manifest.run_id != run_id:
                findings.append(FsckFinding(
                    run_id, "error",
                    f"manifest claims run_id {manifest.run_id!r}",
                ))
            corpus = Path(manifest.corpus_path)
            if not corpus.exists():
                findings.append(FsckFinding(
                    run_id, "warning",
                    f"corpus file {manifest.corpus_path} no longer exists",
                ))
            elif corpus_digest(corpus) != manifest.corpus_sha256:
                findings.append(FsckFinding(
                    run_id, "warning",
                    f"corpus file {manifest.corpus_path} changed since the run",
                ))
        try:
            preds = load_predictions(runs_root, run_id)
        except RunError as exc:
            findings.append(FsckFinding(run_id, "error", str(exc)))
            continue
        seen: set[str] = set()
        for p in preds.predictions:
            if p.scenario_id in seen:
                findings.append(FsckFinding(
                    run_id, "error",
                    f"duplicate prediction for scenario {p.scenario_id!r}",
                ))
            seen.add(p.scenario_id)
        if preds.incomplete:
            findings.append(FsckFinding(
                run_id, "warning",
                "predictions are marked incomplete (extraction was aborted)",
            ))
    return findings
