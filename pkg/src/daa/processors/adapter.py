"""External adapter protocol: line-delimited JSON over a subprocess.

The adapter executable receives one job object on stdin:

    {"protocol": 1, "task": "...", "model_id": "...",
     "inputs": ["/abs/path.wav", ...], "params": {...}, "workdir": "/abs/dir"}

and must print one result object to stdout:

    {"outputs": [{"slot": "...", "kind": "...",
                  "path"|"text"|"labels"|"segments"|"matrix": ...}, ...]}

Audio payloads are WAV files written under the job workdir and referenced by
path. Protocol is versioned; this module speaks version 1.
"""
from __future__ import annotations

import json
import subprocess
from pathlib import Path

from ..audio import load_wav
from ..errors import (
    AdapterFailed,
    AdapterProtocol,
    AdapterSpawn,
    AdapterTimeout,
    DaaError,
)
from ..features import FeatureMatrix
from .types import ProcessorDescriptor, StepOutput

__all__ = ["run_external", "PROTOCOL_VERSION"]

PROTOCOL_VERSION = 1


def run_external(
    descriptor: ProcessorDescriptor,
    input_paths,
    params: dict | None,
    workdir,
    timeout_s: float | None = None,
) -> list[StepOutput]:
    """Spawn the descriptor's adapter and validate its outputs.

    The process is killed at the wall-clock timeout (descriptor default
    600 s). Nonzero exit raises AdapterFailed carrying the captured stderr.
    """
    if descriptor.provenance != "external":
        raise AdapterSpawn(f"{descriptor.id} is not an external processor")
    if not descriptor.exec_argv:
        raise AdapterSpawn(f"no adapter executable configured for {descriptor.id}")
    workdir = Path(workdir).resolve()
    workdir.mkdir(parents=True, exist_ok=True)
    job = {
        "protocol": PROTOCOL_VERSION,
        "task": descriptor.task.value,
        "model_id": descriptor.id,
        "inputs": [str(Path(p).resolve()) for p in input_paths],
        "params": dict(params or {}),
        "workdir": str(workdir),
    }
    timeout = timeout_s if timeout_s is not None else descriptor.timeout_s
    try:
        proc = subprocess.run(
            list(descriptor.exec_argv),
            input=json.dumps(job) + "\n",
            capture_output=True,
            text=True,
            timeout=timeout,
            cwd=str(workdir),
        )
    except FileNotFoundError as exc:
        raise AdapterSpawn(f"cannot spawn adapter for {descriptor.id}: {exc}") from exc
    except subprocess.TimeoutExpired as exc:
        raise AdapterTimeout(
            f"adapter for {descriptor.id} exceeded {timeout:.1f} s and was killed"
        ) from exc
    if proc.returncode != 0:
        stderr = (proc.stderr or "").strip()
        raise AdapterFailed(
            f"adapter for {descriptor.id} exited {proc.returncode}: {stderr}",
            exit_code=proc.returncode,
            stderr=stderr,
        )
    result = _parse_result(descriptor, proc.stdout)
    return _materialize(descriptor, result, workdir)


def _parse_result(descriptor: ProcessorDescriptor, stdout: str) -> dict:
    lines = [ln for ln in (stdout or "").splitlines() if ln.strip()]
    if not lines:
        raise AdapterProtocol(f"adapter for {descriptor.id} produced no result object")
    try:
        result = json.loads(lines[-1])
    except json.JSONDecodeError as exc:
        raise AdapterProtocol(f"adapter result is not valid JSON: {exc}") from exc
    if not isinstance(result, dict) or not isinstance(result.get("outputs"), list):
        raise AdapterProtocol("adapter result must be {'outputs': [...]}")
    return result


def _materialize(descriptor: ProcessorDescriptor, result: dict, workdir: Path) -> list[StepOutput]:
    declared = {s.name: s.kind for s in descriptor.output_slots}
    outputs = result["outputs"]
    if len(outputs) != len(descriptor.output_slots):
        raise AdapterProtocol(
            f"adapter returned {len(outputs)} outputs, descriptor declares "
            f"{len(descriptor.output_slots)}"
        )
    produced: dict[str, StepOutput] = {}
    for item in outputs:
        if not isinstance(item, dict) or "slot" not in item or "kind" not in item:
            raise AdapterProtocol("each output needs 'slot' and 'kind'")
        slot, kind = str(item["slot"]), str(item["kind"])
        if slot not in declared:
            raise AdapterProtocol(f"undeclared output slot {slot!r}")
        if slot in produced:
            raise AdapterProtocol(f"duplicate output slot {slot!r}")
        if kind != declared[slot]:
            raise AdapterProtocol(
                f"slot {slot!r} declared {declared[slot]!r} but adapter sent {kind!r}"
            )
        try:
            payload = _payload(kind, item, workdir)
        except DaaError:
            raise
        except Exception as exc:
            raise AdapterProtocol(f"bad payload for slot {slot!r}: {exc}") from exc
        produced[slot] = StepOutput(slot, kind, payload)
    # deliver in declared slot order
    return [produced[s.name] for s in descriptor.output_slots]


def _payload(kind: str, item: dict, workdir: Path):
    if kind == "audio":
        path = Path(item["path"])
        if not path.is_absolute():
            path = workdir / path
        return load_wav(path)
    if kind == "text":
        return str(item["text"])
    if kind == "labels":
        return [
            {"label": str(x["label"]), "score": float(x["score"])} for x in item["labels"]
        ]
    if kind == "segments":
        return [
            {"start_s": float(x["start_s"]), "end_s": float(x["end_s"])}
            for x in item["segments"]
        ]
    if kind == "matrix":
        return FeatureMatrix.from_json_dict(item["matrix"])
    raise AdapterProtocol(f"unknown output kind {kind!r}")
