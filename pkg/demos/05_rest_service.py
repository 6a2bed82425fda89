#!/usr/bin/env python3
"""REST service walkthrough: the workflow the web UI drives.

Starts the service on an ephemeral port, uploads audio, pulls a feature
matrix, registers and runs a pipeline, polls the job, downloads the report,
and posts a rating. Requires the `requests` package (test extra).
"""
import json
import socket
import tempfile
import threading
import time
from pathlib import Path

import requests
import uvicorn

from daa.audio import encode_wav, synth
from daa.pipeline import export_pipeline
from daa.pipeline.spec import InputBinding, PipelineSpec, StepSpec
from daa.processors.types import TaskKind
from daa.service import create_app

with tempfile.TemporaryDirectory() as tmp:
    app = create_app(Path(tmp) / "data")
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    while not server.started:
        time.sleep(0.02)
    base = f"http://127.0.0.1:{port}/api/v1"
    print("service on", base)

    clip = synth("sine", freq=440, amplitude=0.5, duration_s=2.0)
    entry = requests.post(
        f"{base}/audio", files={"file": ("tone.wav", encode_wav(clip, "32f"), "audio/wav")}
    ).json()
    print("uploaded:", entry["audio_id"], f"{entry['duration_s']:.1f}s sha {entry['sha256'][:12]}")

    matrix = requests.post(
        f"{base}/audio/{entry['audio_id']}/features/mel_spectrogram", json={"n_mels": 32}
    ).json()
    print("mel matrix:", len(matrix["data"]), "bands x", len(matrix["frame_times"]), "frames")

    spec = PipelineSpec(name="vad-then-mfcc", steps=(
        StepSpec("vad", TaskKind.VAD, "vad-energy", inputs=(InputBinding(source=0),)),
        StepSpec("mfcc", TaskKind.FEATURE_EXTRACTION, "feat-extract",
                 params={"feature": "mfcc"}, inputs=(InputBinding(step="vad", slot=1),)),
    ))
    pid = requests.post(f"{base}/pipelines",
                        json=json.loads(export_pipeline(spec))).json()["pipeline_id"]
    job = requests.post(f"{base}/pipelines/{pid}/run",
                        json={"audio_ids": [entry["audio_id"]]}).json()
    while job["state"] not in ("done", "failed"):
        time.sleep(0.05)
        job = requests.get(f"{base}/jobs/{job['job_id']}").json()
    print("job:", job["state"], job["progress"])

    run_id = job["result"]["run_id"]
    report = requests.get(f"{base}/runs/{run_id}/report").json()
    print("steps:", [(s["step_id"], s["status"]) for s in report["results"][0]["steps"]])

    requests.post(f"{base}/runs/{run_id}/ratings",
                  json={"input_index": 0, "step_id": "mfcc", "rating": 9})
    md = requests.get(f"{base}/runs/{run_id}/report", params={"format": "markdown"}).text
    print("report contains rating:", "rating: 9/10" in md)

    server.should_exit = True
    thread.join(timeout=5)
