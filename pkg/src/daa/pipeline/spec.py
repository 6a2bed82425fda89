"""Pipeline description: steps, input bindings, validation, canonical JSON.

A pipeline is an ordered list of steps; each step binds its inputs either to
a source audio slot (an index into the run's input files) or to an output
slot of an *earlier* step. The file format (.dap.json) is canonical JSON —
sorted keys, two-space indent — so shared pipelines diff cleanly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

from ..errors import Malformed, SchemaVersionUnsupported, UnknownTask
from ..processors.registry import Registry
from ..processors.types import TaskKind

__all__ = [
    "CURRENT_SCHEMA_VERSION",
    "InputBinding",
    "StepSpec",
    "PipelineSpec",
    "validate",
    "export_pipeline",
    "import_pipeline",
]

CURRENT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class InputBinding:
    """Either a run-input slot (source) or (step, slot) of an earlier step."""

    source: int | None = None
    step: str | None = None
    slot: int | None = None

    def __post_init__(self):
        if (self.source is None) == (self.step is None):
            raise ValueError("binding must set exactly one of source / step")
        if self.step is not None and self.slot is None:
            object.__setattr__(self, "slot", 0)

    def to_json_dict(self) -> dict:
        if self.source is not None:
            return {"source": self.source}
        return {"step": self.step, "slot": self.slot}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "InputBinding":
        keys = set(obj)
        if keys == {"source"}:
            return cls(source=int(obj["source"]))
        if keys in ({"step"}, {"step", "slot"}):
            return cls(step=str(obj["step"]), slot=int(obj.get("slot", 0)))
        raise Malformed(f"binding must be {{source}} or {{step, slot}}, got {sorted(keys)}")


@dataclass(frozen=True)
class StepSpec:
    step_id: str
    task: TaskKind
    processor_id: str
    params: dict = field(default_factory=dict)
    inputs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))

    def to_json_dict(self) -> dict:
        return {
            "step_id": self.step_id,
            "task": self.task.value,
            "processor_id": self.processor_id,
            "params": dict(self.params),
            "inputs": [b.to_json_dict() for b in self.inputs],
        }


@dataclass(frozen=True)
class PipelineSpec:
    name: str
    steps: tuple = ()
    description: str = ""
    schema_version: int = CURRENT_SCHEMA_VERSION
    created_at: str = ""

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.created_at:
            object.__setattr__(
                self,
                "created_at",
                datetime.now(timezone.utc).isoformat(timespec="seconds"),
            )

    def step(self, step_id: str) -> StepSpec:
        for s in self.steps:
            if s.step_id == step_id:
                return s
        raise KeyError(step_id)

    def to_json_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "name": self.name,
            "description": self.description,
            "created_at": self.created_at,
            "steps": [s.to_json_dict() for s in self.steps],
        }


def validate(spec: PipelineSpec, registry: Registry) -> list[dict]:
    """Check every structural invariant; returns all violations, not just the
    first. Each violation is {code, detail, step_id?}.
    """
    violations: list[dict] = []

    def bad(code: str, detail: str, step_id: str | None = None):
        v = {"code": code, "detail": detail}
        if step_id is not None:
            v["step_id"] = step_id
        violations.append(v)

    if not spec.steps:
        bad("EmptyPipeline", "pipeline has no steps")
        return violations

    order: dict[str, int] = {}
    for i, step in enumerate(spec.steps):
        if step.step_id in order:
            bad("DuplicateStepId", f"step id {step.step_id!r} appears more than once", step.step_id)
        else:
            order[step.step_id] = i

    for i, step in enumerate(spec.steps):
        descriptor = None
        if step.processor_id not in registry:
            bad("UnknownProcessor", f"processor {step.processor_id!r} is not registered", step.step_id)
        else:
            descriptor = registry.get(step.processor_id)
            if descriptor.task is not step.task:
                bad(
                    "TaskMismatch",
                    f"step task {step.task.value} but processor {step.processor_id!r} "
                    f"implements {descriptor.task.value}",
                    step.step_id,
                )
            if len(step.inputs) != descriptor.input_arity:
                bad(
                    "ArityMismatch",
                    f"step has {len(step.inputs)} inputs, processor declares "
                    f"{descriptor.input_arity}",
                    step.step_id,
                )
        for b in step.inputs:
            if b.source is not None:
                if b.source < 0:
                    bad("NegativeSourceIndex", f"source index {b.source} is negative", step.step_id)
                continue
            if b.step not in order:
                bad("UnknownStepRef", f"binding references unknown step {b.step!r}", step.step_id)
                continue
            if order[b.step] >= i:
                bad(
                    "Cycle",
                    f"binding references step {b.step!r} which is not earlier in the pipeline",
                    step.step_id,
                )
                continue
            producer = spec.steps[order[b.step]]
            if producer.processor_id in registry:
                pdesc = registry.get(producer.processor_id)
                if not 0 <= b.slot < pdesc.output_arity:
                    bad(
                        "SlotOutOfRange",
                        f"slot {b.slot} out of range for {producer.step_id!r} "
                        f"({pdesc.output_arity} outputs)",
                        step.step_id,
                    )
                elif pdesc.output_slots[b.slot].kind != "audio":
                    bad(
                        "SlotKindMismatch",
                        f"slot {b.slot} of {producer.step_id!r} is "
                        f"{pdesc.output_slots[b.slot].kind!r}, audio required",
                        step.step_id,
                    )

    reachable: set[str] = set()
    for step in spec.steps:  # spec order == topological order (forward refs are cycles)
        if any(b.source is not None for b in step.inputs) or any(
            b.step in reachable for b in step.inputs if b.step is not None
        ):
            reachable.add(step.step_id)
    for step in spec.steps:
        if step.step_id not in reachable:
            bad("Unreachable", "step has no path from any source audio binding", step.step_id)
    return violations


def export_pipeline(spec: PipelineSpec) -> bytes:
    """Canonical .dap.json bytes; import(export(x)) is the identity."""
    doc = spec.to_json_dict()
    return (json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


_TOP_FIELDS = {"schema_version", "name", "description", "created_at", "steps"}
_STEP_FIELDS = {"step_id", "task", "processor_id", "params", "inputs"}


def import_pipeline(data) -> PipelineSpec:
    """Parse pipeline bytes/str/dict; structural checks only (use validate()
    for graph/registry checks). Unknown fields are rejected so future schema
    versions fail loudly rather than silently dropping content.
    """
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise Malformed(f"pipeline file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise Malformed("pipeline document must be a JSON object")
    version = data.get("schema_version")
    if not isinstance(version, int):
        raise Malformed("schema_version must be an integer")
    if version > CURRENT_SCHEMA_VERSION:
        raise SchemaVersionUnsupported(version)
    unknown = set(data) - _TOP_FIELDS
    if unknown:
        raise Malformed(
            f"unknown pipeline fields {sorted(unknown)} (schema_version {version})"
        )
    steps = []
    raw_steps = data.get("steps")
    if not isinstance(raw_steps, list):
        raise Malformed("steps must be an array")
    for i, raw in enumerate(raw_steps):
        if not isinstance(raw, dict):
            raise Malformed(f"step {i} must be an object")
        unknown = set(raw) - _STEP_FIELDS
        if unknown:
            raise Malformed(f"step {i}: unknown fields {sorted(unknown)} (schema_version {version})")
        try:
            bindings = tuple(InputBinding.from_json_dict(b) for b in raw.get("inputs", []))
            steps.append(
                StepSpec(
                    step_id=str(raw["step_id"]),
                    task=TaskKind.parse(raw["task"]),
                    processor_id=str(raw["processor_id"]),
                    params=dict(raw.get("params", {})),
                    inputs=bindings,
                )
            )
        except (KeyError, TypeError, ValueError, UnknownTask) as exc:
            raise Malformed(f"step {i}: {exc}") from exc
    return PipelineSpec(
        name=str(data.get("name", "")),
        steps=tuple(steps),
        description=str(data.get("description", "")),
        schema_version=version,
        created_at=str(data.get("created_at", "")),
    )
