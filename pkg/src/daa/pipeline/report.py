"""Run reports: canonical JSON, human-readable Markdown, ratings.

The JSON form is the artifact of record (.report.json); Markdown rendering
is derived from it. Ratings (1-10 perceptual quality) attach to individual
(input, step) results and export to CSV for expert-opinion aggregation.
"""
from __future__ import annotations

import copy
import csv
import io
import json
from dataclasses import dataclass

from ..errors import Malformed, NoSuchResult, RatingOutOfRange

__all__ = [
    "RunReport",
    "set_rating",
    "render_report",
    "ratings_csv",
    "erase_volatile",
]

_VOLATILE_KEYS = ("run_id", "created_at", "duration_ms")


@dataclass
class RunReport:
    run_id: str
    created_at: str
    engine_version: str
    pipeline: dict
    inputs: list
    results: list

    def to_json_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "created_at": self.created_at,
            "engine_version": self.engine_version,
            "pipeline": self.pipeline,
            "inputs": self.inputs,
            "results": self.results,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "RunReport":
        try:
            return cls(
                run_id=obj["run_id"],
                created_at=obj["created_at"],
                engine_version=obj["engine_version"],
                pipeline=obj["pipeline"],
                inputs=obj["inputs"],
                results=obj["results"],
            )
        except (KeyError, TypeError) as exc:
            raise Malformed(f"not a run report: {exc}") from exc

    def find_result(self, input_index: int, step_id: str) -> dict:
        for section in self.results:
            if section["input_index"] == input_index:
                for step in section["steps"]:
                    if step["step_id"] == step_id:
                        return step
        raise NoSuchResult(f"no result for input {input_index}, step {step_id!r}")


def set_rating(report: RunReport, input_index: int, step_id: str, rating: int) -> RunReport:
    """Attach a 1-10 perceptual rating to one (input, step) result.

    Re-rating overwrites the previous value.
    """
    if not isinstance(rating, int) or not 1 <= rating <= 10:
        raise RatingOutOfRange(f"rating must be an integer in [1, 10], got {rating!r}")
    step = report.find_result(input_index, step_id)
    step["rating"] = rating
    return report


def render_report(report: RunReport, format: str = "json") -> bytes:
    """Serialize a report: canonical JSON or Markdown. Deterministic bytes."""
    if format == "json":
        doc = report.to_json_dict()
        return (json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    if format == "markdown":
        return _render_markdown(report).encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")


def _render_markdown(report: RunReport) -> str:
    lines: list[str] = []
    pipeline = report.pipeline
    lines.append(f"# Run report — {pipeline.get('name', '(unnamed pipeline)')}")
    lines.append("")
    lines.append(f"- run id: `{report.run_id}`")
    lines.append(f"- created: {report.created_at}")
    lines.append(f"- engine: {report.engine_version}")
    lines.append(f"- steps: {len(pipeline.get('steps', []))}")
    lines.append(f"- inputs: {len(report.results)}")
    lines.append("")
    for section in report.results:
        entry = next(
            (x for x in report.inputs if x["input_index"] == section["input_index"]), None
        )
        names = ", ".join(f["name"] for f in entry["files"]) if entry else section.get("input_name", "?")
        lines.append(f"## Input {section['input_index']}: {names}")
        if entry:
            for f in entry["files"]:
                lines.append(f"- sha256: `{f['sha256']}`")
        lines.append("")
        for step in section["steps"]:
            lines.append(f"### Step `{step['step_id']}` — {step['task']} / {step['processor_id']}")
            lines.append("")
            lines.append(f"- status: **{step['status']}**")
            lines.append(f"- time: {step['duration_ms']:.1f} ms")
            if step.get("params"):
                params = ", ".join(f"{k}={v}" for k, v in sorted(step["params"].items()))
                lines.append(f"- params: {params}")
            if step.get("rating") is not None:
                lines.append(f"- rating: {step['rating']}/10")
            if step.get("error"):
                lines.append(f"- error: {step['error']}")
            for out in step.get("outputs", []):
                lines.extend(_render_output(out))
            lines.append("")
    return "\n".join(lines) + "\n"


def _render_output(out: dict) -> list[str]:
    kind = out["kind"]
    if kind == "text":
        return [f"- `{out['slot']}` (text): {out['text']}"]
    if kind == "audio":
        return [
            f"- `{out['slot']}` (audio): artifact `{out['artifact']}`, "
            f"{out['duration_s']:.3f} s @ {out['sample_rate']} Hz"
        ]
    if kind == "labels":
        items = ", ".join(f"{x['label']}: {x['score']:.3f}" for x in out["labels"])
        return [f"- `{out['slot']}` (labels): {items if items else '(none)'}"]
    if kind == "segments":
        lines = [f"- `{out['slot']}` (segments): {len(out['segments'])}"]
        lines.append("")
        lines.append("  | start (s) | end (s) |")
        lines.append("  |---|---|")
        for seg in out["segments"]:
            lines.append(f"  | {seg['start_s']:.3f} | {seg['end_s']:.3f} |")
        return lines
    if kind == "matrix":
        return [
            f"- `{out['slot']}` (matrix): artifact `{out['artifact']}`, "
            f"{out['rows']}x{out['frames']} ({out['row_axis']})"
        ]
    return [f"- `{out['slot']}` ({kind})"]


def ratings_csv(report: RunReport) -> str:
    """CSV export of all assigned ratings: run_id, input, step_id, rating."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["run_id", "input", "step_id", "rating"])
    for section in report.results:
        for step in section["steps"]:
            if step.get("rating") is not None:
                writer.writerow(
                    [report.run_id, section["input_index"], step["step_id"], step["rating"]]
                )
    return buf.getvalue()


def erase_volatile(doc):
    """Deep copy with run ids, timestamps and durations removed.

    Two runs of the same pipeline over the same inputs compare equal under
    this erasure when all processors are deterministic.
    """
    doc = copy.deepcopy(doc)

    def strip(node):
        if isinstance(node, dict):
            for key in _VOLATILE_KEYS:
                node.pop(key, None)
            for value in node.values():
                strip(value)
        elif isinstance(node, list):
            for value in node:
                strip(value)

    strip(doc)
    return doc
