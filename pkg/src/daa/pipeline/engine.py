"""Pipeline execution: topological dispatch, artifact store, failure containment.

Each run input is processed independently; within one input, steps whose
producers have finished may run concurrently on a shared pool. A failing step
marks its transitive dependents skipped while independent branches continue.
Reports are deterministic (after timestamp erasure) for deterministic
processors regardless of scheduling, because results are keyed by
(input, step) and assembled in pipeline order, and artifacts are
content-addressed.
"""
from __future__ import annotations

import hashlib
import os
import tempfile
import time
import uuid
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from datetime import datetime, timezone
from pathlib import Path

from .. import ENGINE_VERSION
from ..audio import AudioClip, encode_wav, load_wav, resample
from ..errors import DaaError, NoInputs, ValidationFailed
from ..processors.adapter import run_external
from ..processors.builtins import run_builtin
from ..processors.registry import Registry
from ..processors.types import StepOutput
from .report import RunReport
from .spec import PipelineSpec, StepSpec, validate

__all__ = ["ArtifactStore", "run_step", "execute"]


class ArtifactStore:
    """Content-addressed blob store: <sha256>.<ext> under one directory.

    Identical intermediates dedupe to one file and reports can be verified
    against their hashes. Distinct keys may be written concurrently; writes
    are atomic via rename.
    """

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def put_bytes(self, data: bytes, ext: str) -> str:
        digest = hashlib.sha256(data).hexdigest()
        name = f"{digest}.{ext}"
        target = self.root / name
        if not target.exists():
            fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
            try:
                with os.fdopen(fd, "wb") as fh:
                    fh.write(data)
                os.replace(tmp, target)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
        return name

    def put_clip(self, clip: AudioClip) -> tuple[str, bytes]:
        data = encode_wav(clip, bits="32f")
        return self.put_bytes(data, "wav"), data

    def path(self, name: str) -> Path:
        return self.root / name


def _serialize_outputs(outputs: list[StepOutput], store: ArtifactStore) -> list[dict]:
    import json

    docs = []
    for out in outputs:
        doc: dict = {"slot": out.slot, "kind": out.kind}
        if out.kind == "audio":
            clip = out.payload
            name, _ = store.put_clip(clip)
            doc.update(
                artifact=name,
                sample_rate=clip.sample_rate,
                channels=clip.channels,
                duration_s=clip.duration_s,
            )
        elif out.kind == "text":
            doc["text"] = out.payload
        elif out.kind == "labels":
            doc["labels"] = out.payload
        elif out.kind == "segments":
            doc["segments"] = out.payload
        elif out.kind == "matrix":
            blob = json.dumps(out.payload.to_json_dict(), sort_keys=True).encode("utf-8")
            doc.update(
                artifact=store.put_bytes(blob, "json"),
                rows=out.payload.rows,
                frames=out.payload.frames,
                row_axis=out.payload.row_axis,
            )
        docs.append(doc)
    return docs


def run_step(
    step: StepSpec,
    resolved_inputs: list[AudioClip],
    registry: Registry,
    store: ArtifactStore,
    workdir,
) -> tuple[dict, list[StepOutput]]:
    """Dispatch one step on materialized inputs.

    Returns (result document, in-memory outputs). Failures are captured in
    the document's status, never raised, so sibling steps keep their results.
    """
    descriptor = registry.get(step.processor_id)
    started = time.perf_counter()
    try:
        clips = list(resolved_inputs)
        if descriptor.required_sample_rate:
            clips = [
                c if c.sample_rate == descriptor.required_sample_rate
                else resample(c, descriptor.required_sample_rate)
                for c in clips
            ]
        if descriptor.provenance == "builtin":
            outputs = run_builtin(descriptor.id, clips, step.params)
        else:
            workdir = Path(workdir)
            workdir.mkdir(parents=True, exist_ok=True)
            paths = []
            for i, clip in enumerate(clips):
                p = workdir / f"input_{i}.wav"
                p.write_bytes(encode_wav(clip, bits="32f"))
                paths.append(p)
            outputs = run_external(descriptor, paths, step.params, workdir)
        if len(outputs) != descriptor.output_arity:
            raise DaaError(
                f"processor {descriptor.id} produced {len(outputs)} outputs, "
                f"declared {descriptor.output_arity}"
            )
        duration_ms = (time.perf_counter() - started) * 1000.0
        doc = {
            "step_id": step.step_id,
            "task": step.task.value,
            "processor_id": step.processor_id,
            "params": dict(step.params),
            "status": "done",
            "duration_ms": duration_ms,
            "outputs": _serialize_outputs(outputs, store),
            "error": None,
            "rating": None,
        }
        return doc, outputs
    except DaaError as exc:
        duration_ms = (time.perf_counter() - started) * 1000.0
        doc = {
            "step_id": step.step_id,
            "task": step.task.value,
            "processor_id": step.processor_id,
            "params": dict(step.params),
            "status": "failed",
            "duration_ms": duration_ms,
            "outputs": [],
            "error": str(exc),
            "rating": None,
        }
        return doc, []


def _skipped_doc(step: StepSpec, upstream: str) -> dict:
    return {
        "step_id": step.step_id,
        "task": step.task.value,
        "processor_id": step.processor_id,
        "params": dict(step.params),
        "status": "skipped",
        "duration_ms": 0.0,
        "outputs": [],
        "error": f"skipped: upstream step {upstream!r} did not complete",
        "rating": None,
    }


def _normalize_inputs(inputs, input_names=None) -> list[list[tuple[str, AudioClip, bytes]]]:
    """Each run input becomes a list of (name, clip, wav_bytes) source slots.

    ``input_names`` optionally overrides the reported name per input (the
    service passes original upload filenames so reports match local runs).
    """
    normalized = []
    for idx, item in enumerate(inputs):
        slots = item if isinstance(item, (tuple, list)) else (item,)
        override = None
        if input_names is not None:
            override = input_names[idx]
            if not isinstance(override, (tuple, list)):
                override = (override,)
        entry = []
        for j, slot in enumerate(slots):
            if isinstance(slot, AudioClip):
                data = encode_wav(slot, bits="32f")
                name = f"clip-{hashlib.sha256(data).hexdigest()[:12]}.wav"
                entry.append((name, slot, data))
            else:
                path = Path(slot)
                entry.append((path.name, load_wav(path), path.read_bytes()))
            if override is not None and j < len(override) and override[j]:
                entry[-1] = (str(override[j]),) + entry[-1][1:]
        normalized.append(entry)
    return normalized


def execute(
    spec: PipelineSpec,
    inputs,
    registry: Registry,
    out_dir=None,
    pool_width: int | None = None,
    on_step_done=None,
    input_names=None,
) -> RunReport:
    """Run a validated pipeline over one or more inputs.

    ``inputs`` elements are WAV paths or AudioClips (or tuples of them for
    pipelines binding more than one source slot); each element is one
    independent execution.
    """
    violations = validate(spec, registry)
    if violations:
        raise ValidationFailed(violations)
    items = list(inputs)
    if not items:
        raise NoInputs("execute() needs at least one input")
    normalized = _normalize_inputs(items, input_names)

    max_source = max(
        (b.source for step in spec.steps for b in step.inputs if b.source is not None),
        default=0,
    )
    for idx, entry in enumerate(normalized):
        if len(entry) <= max_source:
            raise NoInputs(
                f"input {idx} provides {len(entry)} file(s) but the pipeline "
                f"binds source index {max_source}"
            )

    run_id = uuid.uuid4().hex
    run_dir = Path(out_dir) if out_dir is not None else Path(tempfile.mkdtemp(prefix="daa-run-"))
    run_dir.mkdir(parents=True, exist_ok=True)
    store = ArtifactStore(run_dir / "artifacts")

    order = {s.step_id: i for i, s in enumerate(spec.steps)}
    step_deps = {
        s.step_id: sorted({b.step for b in s.inputs if b.step is not None}, key=order.get)
        for s in spec.steps
    }
    dependents: dict[str, list[str]] = {s.step_id: [] for s in spec.steps}
    for sid, deps in step_deps.items():
        for d in deps:
            dependents[d].append(sid)

    n_inputs = len(normalized)
    docs: dict[tuple[int, str], dict] = {}
    outputs: dict[tuple[int, str], list[StepOutput]] = {}
    remaining = {(i, sid): len(step_deps[sid]) for i in range(n_inputs) for sid in step_deps}

    def mark_skipped(i: int, sid: str, upstream: str):
        key = (i, sid)
        if key in docs:
            return
        docs[key] = _skipped_doc(spec.step(sid), upstream)
        for child in dependents[sid]:
            mark_skipped(i, child, upstream)

    def resolve(i: int, step: StepSpec) -> list[AudioClip]:
        clips = []
        for b in step.inputs:
            if b.source is not None:
                clips.append(normalized[i][b.source][1])
            else:
                clips.append(outputs[(i, b.step)][b.slot].payload)
        return clips

    width = pool_width or min(32, (os.cpu_count() or 4))
    with ThreadPoolExecutor(max_workers=width) as pool:
        pending: dict = {}
        ready = [
            (i, s) for i in range(n_inputs) for s in spec.steps if remaining[(i, s.step_id)] == 0
        ]

        def submit(i: int, step: StepSpec):
            wd = run_dir / "steps" / f"input{i}" / step.step_id
            fut = pool.submit(run_step, step, resolve(i, step), registry, store, wd)
            pending[fut] = (i, step.step_id)

        for i, step in ready:
            submit(i, step)
        while pending:
            done, _ = wait(list(pending), return_when=FIRST_COMPLETED)
            for fut in done:
                i, sid = pending.pop(fut)
                doc, outs = fut.result()
                docs[(i, sid)] = doc
                outputs[(i, sid)] = outs
                if on_step_done is not None:
                    on_step_done(i, sid, doc["status"])
                if doc["status"] != "done":
                    for child in dependents[sid]:
                        mark_skipped(i, child, sid)
                else:
                    for child in dependents[sid]:
                        key = (i, child)
                        if key in docs:
                            continue
                        remaining[key] -= 1
                        if remaining[key] == 0:
                            submit(i, spec.step(child))

    results = [
        {
            "input_index": i,
            "input_name": normalized[i][0][0],
            "steps": [docs[(i, s.step_id)] for s in spec.steps],
        }
        for i in range(n_inputs)
    ]
    report = RunReport(
        run_id=run_id,
        created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        engine_version=ENGINE_VERSION,
        pipeline=spec.to_json_dict(),
        inputs=[
            {
                "input_index": i,
                "files": [
                    {"name": name, "sha256": hashlib.sha256(data).hexdigest()}
                    for name, _, data in entry
                ],
            }
            for i, entry in enumerate(normalized)
        ],
        results=results,
    )
    return report
