#!/usr/bin/env python3
"""External adapter walkthrough.

Deep models run out of process behind a one-line JSON protocol: job on
stdin, result on stdout. This demo writes a toy "transcriber" adapter that
reports the duration of the audio it received, registers it through a model
catalog, and runs it inside a pipeline next to built-in steps.
"""
import json
import sys
import tempfile
from pathlib import Path

from daa.audio import synth
from daa.pipeline import execute
from daa.pipeline.spec import InputBinding, PipelineSpec, StepSpec
from daa.processors.registry import registry_load
from daa.processors.types import TaskKind

ADAPTER = '''#!/usr/bin/env python3
import json, struct, sys
job = json.loads(sys.stdin.readline())      # {"protocol": 1, "inputs": [...], ...}
raw = open(job["inputs"][0], "rb").read()
# crude WAV probe: frame count / sample rate out of the header
rate = struct.unpack_from("<I", raw, 24)[0]
frames = (len(raw) - 44) // struct.unpack_from("<H", raw, 32)[0]
text = f"adapter heard {frames / rate:.2f} seconds of audio"
print(json.dumps({"outputs": [{"slot": "text", "kind": "text", "text": text}]}))
'''

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    adapter_path = tmp / "duration_adapter.py"
    adapter_path.write_text(ADAPTER)

    catalog_path = tmp / "catalog.json"
    catalog_path.write_text(json.dumps({
        "schema_version": 1,
        "models": [{
            "id": "asr-duration-toy",
            "task": "ASR",
            "exec": [sys.executable, str(adapter_path)],
            "timeout_s": 30,
            "metadata": {"system": "toy duration reporter"},
        }],
    }))

    registry = registry_load(catalog_path)
    print("registered external models:",
          [d.id for d in registry.list() if d.provenance == "external"])

    spec = PipelineSpec(name="enhance-then-transcribe", steps=(
        StepSpec("enhance", TaskKind.SPEECH_ENHANCEMENT, "enhance-specsub",
                 inputs=(InputBinding(source=0),)),
        StepSpec("transcribe", TaskKind.ASR, "asr-duration-toy",
                 inputs=(InputBinding(step="enhance", slot=0),)),
    ))
    clip = synth("white_noise", amplitude=0.2, duration_s=2.5, seed=5)
    report = execute(spec, [clip], registry, out_dir=tmp / "run")
    for step in report.results[0]["steps"]:
        line = step["outputs"][0].get("text", step["outputs"][0].get("artifact"))
        print(f"{step['step_id']:10} {step['status']:5} -> {line}")
