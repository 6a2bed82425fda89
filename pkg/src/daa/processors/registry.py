"""Registry of processors: built-ins plus a JSON model catalog."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from ..errors import CatalogParse, DuplicateId, UnknownProcessor
from .builtins import BUILTINS
from .types import OutputSlot, ProcessorDescriptor, TaskKind

__all__ = ["Registry", "registry_load", "list_models", "builtin_descriptors", "seed_catalog_path"]

# output shapes assumed per task when a catalog entry does not spell them out
_DEFAULT_SLOTS = {
    TaskKind.ASR: (OutputSlot("text", "text"),),
    TaskKind.EMOTION_RECOGNITION: (OutputSlot("labels", "labels"),),
    TaskKind.LANGUAGE_ID: (OutputSlot("labels", "labels"),),
    TaskKind.SPEECH_ENHANCEMENT: (OutputSlot("audio", "audio"),),
    TaskKind.SPEAKER_VERIFICATION: (OutputSlot("labels", "labels"),),
    TaskKind.VAD: (OutputSlot("segments", "segments"), OutputSlot("audio", "speech")),
    TaskKind.FEATURE_EXTRACTION: (OutputSlot("matrix", "matrix"),),
}


class Registry:
    """Immutable after load; safe to share across threads."""

    def __init__(self, descriptors):
        self._by_id: dict[str, ProcessorDescriptor] = {}
        for d in descriptors:
            if d.id in self._by_id:
                raise DuplicateId(f"duplicate processor id {d.id!r}")
            self._by_id[d.id] = d

    def get(self, processor_id: str) -> ProcessorDescriptor:
        try:
            return self._by_id[processor_id]
        except KeyError:
            raise UnknownProcessor(f"no processor registered with id {processor_id!r}") from None

    def __contains__(self, processor_id: str) -> bool:
        return processor_id in self._by_id

    def list(self, task: TaskKind | None = None) -> list[ProcessorDescriptor]:
        """Stable order: built-ins first, then catalog order."""
        items = list(self._by_id.values())
        if task is not None:
            items = [d for d in items if d.task is task]
        return items


def builtin_descriptors() -> list[ProcessorDescriptor]:
    return list(BUILTINS.values())


def seed_catalog_path() -> Path:
    """The packaged model catalog seeded from the published benchmark table."""
    return Path(resources.files("daa.processors") / "seed_catalog.json")


def registry_load(catalog_path=None) -> Registry:
    """Built-ins plus the entries of ``catalog_path`` (optional)."""
    descriptors = builtin_descriptors()
    if catalog_path is not None:
        descriptors += _parse_catalog(catalog_path)
    return Registry(descriptors)


def list_models(registry: Registry, task: TaskKind | None = None) -> list[ProcessorDescriptor]:
    return registry.list(task)


def _parse_catalog(path) -> list[ProcessorDescriptor]:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CatalogParse(f"cannot read catalog {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CatalogParse(f"catalog is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict) or not isinstance(obj.get("models"), list):
        raise CatalogParse("catalog must be an object with a 'models' array")
    out = []
    for i, entry in enumerate(obj["models"]):
        try:
            out.append(_parse_entry(entry))
        except (KeyError, TypeError, ValueError) as exc:
            raise CatalogParse(f"catalog entry {i}: {exc}") from exc
    return out


def _parse_entry(entry: dict) -> ProcessorDescriptor:
    task = TaskKind.parse(entry["task"])
    if "output_slots" in entry:
        slots = tuple(OutputSlot(s["kind"], s["name"]) for s in entry["output_slots"])
    elif task is TaskKind.SPEECH_SEPARATION:
        n = int(entry.get("n_sources", 2))
        slots = tuple(OutputSlot("audio", f"source_{k}") for k in range(n))
    else:
        slots = _DEFAULT_SLOTS[task]
    return ProcessorDescriptor(
        id=str(entry["id"]),
        task=task,
        output_slots=slots,
        input_arity=int(entry.get("input_arity", 1)),
        provenance=str(entry.get("provenance", "external")),
        required_sample_rate=entry.get("required_sample_rate"),
        metadata=dict(entry.get("metadata", {})),
        exec_argv=tuple(entry.get("exec", []) or []),
        timeout_s=float(entry.get("timeout_s", 600.0)),
    )
