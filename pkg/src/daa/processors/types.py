"""Processor domain types: tasks, descriptors, step outputs."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..audio import AudioClip
from ..errors import UnknownTask
from ..features import FeatureMatrix

__all__ = ["TaskKind", "OutputSlot", "ProcessorDescriptor", "StepOutput", "SLOT_KINDS"]

SLOT_KINDS = ("audio", "text", "labels", "matrix", "segments")


class TaskKind(Enum):
    """The supported analysis tasks, serialized by their short codes."""

    ASR = "ASR"
    EMOTION_RECOGNITION = "ER"
    LANGUAGE_ID = "LI"
    SPEECH_ENHANCEMENT = "SE"
    SPEECH_SEPARATION = "SS"
    SPEAKER_VERIFICATION = "SV"
    VAD = "VAD"
    FEATURE_EXTRACTION = "FEAT"

    @classmethod
    def parse(cls, code: str) -> "TaskKind":
        try:
            return cls(code)
        except ValueError:
            raise UnknownTask(
                f"unknown task {code!r}; known: {', '.join(t.value for t in cls)}"
            ) from None


@dataclass(frozen=True)
class OutputSlot:
    kind: str
    name: str

    def __post_init__(self):
        if self.kind not in SLOT_KINDS:
            raise ValueError(f"unknown slot kind {self.kind!r}")


@dataclass(frozen=True)
class ProcessorDescriptor:
    """A registered analysis capability, built-in or external.

    Output arity is static: separation models with different source counts
    register as distinct descriptors so pipelines can be validated before
    execution. ``required_sample_rate`` of None means any rate is accepted.
    """

    id: str
    task: TaskKind
    output_slots: tuple
    input_arity: int = 1
    provenance: str = "builtin"
    required_sample_rate: int | None = None
    metadata: dict = field(default_factory=dict)
    exec_argv: tuple = ()
    timeout_s: float = 600.0

    def __post_init__(self):
        if not self.output_slots:
            raise ValueError(f"descriptor {self.id}: output_slots must be non-empty")
        if self.input_arity < 1:
            raise ValueError(f"descriptor {self.id}: input_arity must be >= 1")
        if self.provenance not in ("builtin", "external"):
            raise ValueError(f"descriptor {self.id}: bad provenance {self.provenance!r}")
        object.__setattr__(self, "output_slots", tuple(self.output_slots))
        object.__setattr__(self, "exec_argv", tuple(self.exec_argv))

    @property
    def output_arity(self) -> int:
        return len(self.output_slots)

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "task": self.task.value,
            "input_arity": self.input_arity,
            "output_slots": [{"kind": s.kind, "name": s.name} for s in self.output_slots],
            "provenance": self.provenance,
            "required_sample_rate": self.required_sample_rate,
            "metadata": self.metadata,
            "timeout_s": self.timeout_s,
        }


@dataclass(frozen=True)
class StepOutput:
    """One produced value, tagged with its slot; payload type matches kind:

    audio -> AudioClip, text -> str, labels -> [{label, score}],
    matrix -> FeatureMatrix, segments -> [{start_s, end_s}].
    """

    slot: str
    kind: str
    payload: object

    def __post_init__(self):
        if self.kind not in SLOT_KINDS:
            raise ValueError(f"unknown slot kind {self.kind!r}")
        ok = {
            "audio": lambda p: isinstance(p, AudioClip),
            "text": lambda p: isinstance(p, str),
            "matrix": lambda p: isinstance(p, FeatureMatrix),
            "labels": _valid_labels,
            "segments": _valid_segments,
        }[self.kind](self.payload)
        if not ok:
            raise ValueError(f"payload does not match slot kind {self.kind!r}")


def _valid_labels(payload) -> bool:
    if not isinstance(payload, (list, tuple)):
        return False
    total = 0.0
    for item in payload:
        if not isinstance(item, dict) or "label" not in item or "score" not in item:
            return False
        score = float(item["score"])
        if not 0.0 <= score <= 1.0:
            return False
        total += score
    return total <= 1.0 + 1e-6 or len(payload) == 0


def _valid_segments(payload) -> bool:
    if not isinstance(payload, (list, tuple)):
        return False
    return all(
        isinstance(item, dict) and "start_s" in item and "end_s" in item
        and float(item["start_s"]) <= float(item["end_s"])
        for item in payload
    )
