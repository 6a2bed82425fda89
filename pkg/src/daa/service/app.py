"""HTTP API (v1): the backend behind the web UI and remote CLI use.

File-backed persistence under one data directory:

    data_dir/audio/<id>.wav + audio/index.json
    data_dir/pipelines/<id>.dap.json
    data_dir/runs/<run_id>/report.json (+ artifacts/, steps/)

Feature extraction responds synchronously (fast); step execution, pipeline
runs and evaluations go through async jobs (models can be slow).
"""
from __future__ import annotations

import hashlib
import json
import tempfile
import threading
import uuid
from pathlib import Path

from fastapi import Depends, FastAPI, HTTPException, Request, Response, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .. import ENGINE_VERSION
from ..audio import decode_wav
from ..errors import (
    CorruptHeader,
    DaaError,
    EmptyAudio,
    NoSuchResult,
    RatingOutOfRange,
    UnknownFeature,
    UnsupportedFormat,
    ValidationFailed,
)
from ..featureset import FEATURES, compute_feature
from ..heatmap import render_heatmap
from ..metrics.manifest import SIGNAL_METRICS, TEXT_METRICS, evaluate_manifest
from ..metrics.text import TextNorm, cer, wer
from ..pipeline import (
    RunReport,
    execute,
    export_pipeline,
    import_pipeline,
    render_report,
    set_rating,
    validate,
)
from ..processors.registry import Registry, registry_load
from ..processors.types import TaskKind
from .jobs import JobTable

__all__ = ["create_app", "serve"]

_TASK_NAMES = {
    "ASR": "automatic speech recognition",
    "ER": "emotion recognition",
    "LI": "language identification",
    "SE": "speech enhancement",
    "SS": "speech separation",
    "SV": "speaker verification",
    "VAD": "voice activity detection",
    "FEAT": "feature extraction",
}


class _State:
    def __init__(self, data_dir: Path, registry: Registry, pool_width: int, max_upload: int):
        self.data_dir = data_dir
        self.registry = registry
        self.max_upload = max_upload
        self.audio_dir = data_dir / "audio"
        self.pipeline_dir = data_dir / "pipelines"
        self.runs_dir = data_dir / "runs"
        for d in (self.audio_dir, self.pipeline_dir, self.runs_dir):
            d.mkdir(parents=True, exist_ok=True)
        self.index_path = self.audio_dir / "index.json"
        self.lock = threading.Lock()
        self.jobs = JobTable(pool_width)

    def audio_index(self) -> dict:
        if self.index_path.exists():
            return json.loads(self.index_path.read_text(encoding="utf-8"))
        return {}

    def save_audio(self, filename: str, data: bytes) -> dict:
        clip = decode_wav(data)
        audio_id = "a" + uuid.uuid4().hex[:11]
        entry = {
            "audio_id": audio_id,
            "filename": filename or f"{audio_id}.wav",
            "sha256": hashlib.sha256(data).hexdigest(),
            "duration_s": clip.duration_s,
            "sample_rate": clip.sample_rate,
            "channels": clip.channels,
            "clipped": clip.clipped,
        }
        with self.lock:
            (self.audio_dir / f"{audio_id}.wav").write_bytes(data)
            index = self.audio_index()
            index[audio_id] = entry
            self.index_path.write_text(json.dumps(index, sort_keys=True, indent=2), encoding="utf-8")
        return entry

    def audio_path(self, audio_id: str) -> Path:
        path = self.audio_dir / f"{audio_id}.wav"
        if not path.exists():
            raise HTTPException(404, detail=f"unknown audio id {audio_id!r}")
        return path

    def pipeline_path(self, pipeline_id: str) -> Path:
        path = self.pipeline_dir / f"{pipeline_id}.dap.json"
        if not path.exists():
            raise HTTPException(404, detail=f"unknown pipeline id {pipeline_id!r}")
        return path

    def report_path(self, run_id: str) -> Path:
        path = self.runs_dir / run_id / "report.json"
        if not path.exists():
            raise HTTPException(404, detail=f"unknown run id {run_id!r}")
        return path

    def load_report(self, run_id: str) -> RunReport:
        doc = json.loads(self.report_path(run_id).read_text(encoding="utf-8"))
        return RunReport.from_json_dict(doc)

    def save_report(self, report: RunReport):
        path = self.runs_dir / report.run_id / "report.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(render_report(report, "json"))


def create_app(
    data_dir,
    catalog_path=None,
    token: str | None = None,
    max_upload_mb: int = 512,
    pool_width: int | None = None,
) -> FastAPI:
    import os

    registry = registry_load(catalog_path)
    state = _State(
        Path(data_dir),
        registry,
        pool_width or (os.cpu_count() or 4),
        max_upload_mb * 1024 * 1024,
    )
    app = FastAPI(title="audio analysis service", version=ENGINE_VERSION)
    app.state.daa = state
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def auth(request: Request):
        if token is None:
            return
        supplied = request.headers.get("authorization", "")
        if supplied != f"Bearer {token}":
            raise HTTPException(401, detail="missing or invalid bearer token")

    dep = [Depends(auth)]

    @app.exception_handler(DaaError)
    def _domain_error(_request, exc: DaaError):
        if isinstance(exc, ValidationFailed):
            return JSONResponse(status_code=400, content={"violations": exc.violations})
        if isinstance(exc, (UnsupportedFormat, CorruptHeader, EmptyAudio)):
            return JSONResponse(status_code=422, content={"detail": str(exc)})
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    # --- audio ---

    @app.post("/api/v1/audio", dependencies=dep)
    async def upload_audio(file: UploadFile):
        data = await file.read()
        if len(data) > state.max_upload:
            raise HTTPException(413, detail=f"upload exceeds {state.max_upload} bytes")
        return state.save_audio(file.filename, data)

    @app.get("/api/v1/audio", dependencies=dep)
    def list_audio():
        index = state.audio_index()
        return {"items": [index[k] for k in sorted(index)]}

    @app.get("/api/v1/audio/{audio_id}", dependencies=dep)
    def get_audio(audio_id: str):
        return Response(content=state.audio_path(audio_id).read_bytes(), media_type="audio/wav")

    # --- features ---

    @app.get("/api/v1/features", dependencies=dep)
    def list_features():
        return {"features": [{"name": n, "params": FEATURES[n]} for n in FEATURES]}

    @app.post("/api/v1/audio/{audio_id}/features/{name}", dependencies=dep)
    async def run_feature(audio_id: str, name: str, request: Request, render: str | None = None):
        body = await request.body()
        params = json.loads(body) if body else {}
        if not isinstance(params, dict):
            raise HTTPException(400, detail="params body must be a JSON object")
        clip = decode_wav(state.audio_path(audio_id).read_bytes())
        try:
            matrix = compute_feature(clip, name, params)
        except UnknownFeature as exc:
            raise HTTPException(400, detail=str(exc)) from exc
        if render == "png":
            return Response(content=render_heatmap(matrix), media_type="image/png")
        return matrix.to_json_dict()

    # --- registry ---

    @app.get("/api/v1/tasks", dependencies=dep)
    def list_tasks():
        return {
            "tasks": [{"code": t.value, "name": _TASK_NAMES[t.value]} for t in TaskKind]
        }

    @app.get("/api/v1/tasks/{task}/models", dependencies=dep)
    def list_task_models(task: str):
        try:
            kind = TaskKind.parse(task)
        except DaaError as exc:
            raise HTTPException(404, detail=str(exc)) from exc
        return {"models": [d.to_json_dict() for d in state.registry.list(kind)]}

    # --- steps & pipelines ---

    def _resolve_audio_ids(audio_ids) -> tuple[list, list]:
        index = state.audio_index()

        def name_of(audio_id):
            return index.get(audio_id, {}).get("filename", f"{audio_id}.wav")

        resolved, names = [], []
        for item in audio_ids:
            if isinstance(item, list):
                resolved.append(tuple(state.audio_path(a) for a in item))
                names.append(tuple(name_of(a) for a in item))
            else:
                resolved.append(state.audio_path(item))
                names.append(name_of(item))
        return resolved, names

    def _run_pipeline_job(spec, inputs, names, kind: str):
        violations = validate(spec, state.registry)
        if violations:
            return JSONResponse(status_code=400, content={"violations": violations})
        total = len(spec.steps) * len(inputs)

        def work(job):
            report = execute(
                spec,
                inputs,
                state.registry,
                out_dir=state.runs_dir / f"pending-{job.job_id}",
                on_step_done=lambda *_: state.jobs.bump(job),
                input_names=names,
            )
            run_dir = state.runs_dir / f"pending-{job.job_id}"
            final_dir = state.runs_dir / report.run_id
            run_dir.rename(final_dir)
            state.save_report(report)
            return {"run_id": report.run_id}

        job = state.jobs.submit(kind, total, work)
        return job.to_json_dict()

    @app.post("/api/v1/steps/run", dependencies=dep)
    async def run_single_step(request: Request):
        body = await request.json()
        try:
            doc = {
                "schema_version": 1,
                "name": "adhoc-step",
                "description": "single step run",
                "created_at": "1970-01-01T00:00:00+00:00",
                "steps": [body["step_spec"]],
            }
            spec = import_pipeline(doc)
            audio_ids = body["audio_ids"]
        except (KeyError, TypeError) as exc:
            raise HTTPException(400, detail=f"body needs step_spec and audio_ids: {exc}") from exc
        inputs, names = _resolve_audio_ids(audio_ids)
        return _run_pipeline_job(spec, inputs, names, "step")

    @app.post("/api/v1/pipelines", dependencies=dep)
    async def create_pipeline(request: Request):
        spec = import_pipeline(await request.body())
        violations = validate(spec, state.registry)
        if violations:
            return JSONResponse(status_code=400, content={"violations": violations})
        pipeline_id = "p" + uuid.uuid4().hex[:11]
        with state.lock:
            (state.pipeline_dir / f"{pipeline_id}.dap.json").write_bytes(export_pipeline(spec))
        return {"pipeline_id": pipeline_id, "name": spec.name}

    @app.get("/api/v1/pipelines", dependencies=dep)
    def list_pipelines():
        items = []
        for path in sorted(state.pipeline_dir.glob("*.dap.json")):
            doc = json.loads(path.read_text(encoding="utf-8"))
            items.append(
                {
                    "pipeline_id": path.name[: -len(".dap.json")],
                    "name": doc.get("name", ""),
                    "steps": len(doc.get("steps", [])),
                    "created_at": doc.get("created_at", ""),
                }
            )
        return {"items": items}

    @app.get("/api/v1/pipelines/{pipeline_id}", dependencies=dep)
    def get_pipeline(pipeline_id: str):
        # canonical stored bytes, so clients can byte-compare exports
        return Response(
            content=state.pipeline_path(pipeline_id).read_bytes(),
            media_type="application/json",
        )

    @app.put("/api/v1/pipelines/{pipeline_id}", dependencies=dep)
    async def replace_pipeline(pipeline_id: str, request: Request):
        path = state.pipeline_path(pipeline_id)
        spec = import_pipeline(await request.body())
        violations = validate(spec, state.registry)
        if violations:
            return JSONResponse(status_code=400, content={"violations": violations})
        with state.lock:
            path.write_bytes(export_pipeline(spec))
        return {"pipeline_id": pipeline_id, "name": spec.name}

    @app.delete("/api/v1/pipelines/{pipeline_id}", dependencies=dep)
    def delete_pipeline(pipeline_id: str):
        path = state.pipeline_path(pipeline_id)
        with state.lock:
            path.unlink()
        return {"deleted": pipeline_id}

    @app.post("/api/v1/pipelines/{pipeline_id}/run", dependencies=dep)
    async def run_pipeline(pipeline_id: str, request: Request):
        body = await request.json()
        audio_ids = body.get("audio_ids")
        if not audio_ids:
            raise HTTPException(400, detail="audio_ids must be a non-empty list")
        spec = import_pipeline(state.pipeline_path(pipeline_id).read_bytes())
        inputs, names = _resolve_audio_ids(audio_ids)
        return _run_pipeline_job(spec, inputs, names, "pipeline_run")

    # --- jobs, reports, ratings ---

    @app.get("/api/v1/jobs/{job_id}", dependencies=dep)
    def get_job(job_id: str):
        job = state.jobs.get(job_id)
        if job is None:
            raise HTTPException(404, detail=f"unknown job id {job_id!r}")
        return job.to_json_dict()

    @app.get("/api/v1/runs/{run_id}/report", dependencies=dep)
    def get_report(run_id: str, format: str = "json"):
        report = state.load_report(run_id)
        if format == "markdown":
            return Response(content=render_report(report, "markdown"), media_type="text/markdown")
        if format != "json":
            raise HTTPException(400, detail="format must be json or markdown")
        return Response(content=render_report(report, "json"), media_type="application/json")

    @app.post("/api/v1/runs/{run_id}/ratings", dependencies=dep)
    async def rate_step(run_id: str, request: Request):
        body = await request.json()
        report = state.load_report(run_id)
        try:
            set_rating(report, int(body["input_index"]), str(body["step_id"]), body["rating"])
        except (RatingOutOfRange, NoSuchResult) as exc:
            code = 400 if isinstance(exc, RatingOutOfRange) else 404
            raise HTTPException(code, detail=str(exc)) from exc
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(400, detail=f"body needs input_index, step_id, rating: {exc}") from exc
        state.save_report(report)
        rated = [
            {"input_index": s["input_index"], "step_id": step["step_id"], "rating": step["rating"]}
            for s in report.results
            for step in s["steps"]
            if step.get("rating") is not None
        ]
        return {"run_id": run_id, "ratings": rated}

    # --- evaluation ---

    @app.post("/api/v1/evaluate", dependencies=dep)
    async def evaluate(request: Request):
        body = await request.json()
        metrics = body.get("metrics") or ([body["metric"]] if body.get("metric") else None)
        if not metrics:
            raise HTTPException(400, detail="metrics (or metric) is required")
        unknown = [m for m in metrics if m not in TEXT_METRICS + SIGNAL_METRICS]
        if unknown:
            raise HTTPException(400, detail=f"unknown metrics: {', '.join(unknown)}")
        norm = TextNorm(**body.get("normalization", {}))
        if body.get("manifest_csv") is not None:
            csv_text = body["manifest_csv"]

            def work(job):
                with tempfile.TemporaryDirectory() as tmp:
                    manifest = Path(tmp) / "manifest.csv"
                    manifest.write_text(csv_text, encoding="utf-8")
                    return {"report": evaluate_manifest(manifest, metrics, norm)}

            return state.jobs.submit("evaluation", 1, work).to_json_dict()
        pairs = body.get("pairs")
        if not pairs:
            raise HTTPException(400, detail="provide manifest_csv or pairs")

        def work_pairs(job):
            rows = []
            for i, pair in enumerate(pairs):
                row: dict = {"id": pair.get("id", str(i)), "metrics": {}}
                try:
                    ref, hyp = _resolve_pair(pair)
                    for m in metrics:
                        row["metrics"][m] = _inline_metric(m, ref, hyp, norm)
                except DaaError as exc:
                    row["error"] = str(exc)
                rows.append(row)
                state.jobs.bump(job)
            return {"report": {"rows": rows, "config": {"metrics": metrics}}}

        def _resolve_pair(pair):
            if "reference_audio_id" in pair:
                ref = decode_wav(state.audio_path(pair["reference_audio_id"]).read_bytes())
                hyp = decode_wav(state.audio_path(pair["hypothesis_audio_id"]).read_bytes())
                return ref, hyp
            return str(pair["reference"]), str(pair["hypothesis"])

        def _inline_metric(m, ref, hyp, norm):
            from ..metrics.signal import sdr_fir, si_snr, snr as snr_fn
            from ..metrics.stoi import stoi as stoi_fn

            if m in TEXT_METRICS:
                if not isinstance(ref, str):
                    raise DaaError(f"{m} needs text pairs")
                res = wer(ref, hyp, norm) if m == "wer" else cer(ref, hyp, norm)
                return res.to_json_dict()["rate"]
            if isinstance(ref, str):
                raise DaaError(f"{m} needs audio pairs (reference_audio_id)")
            return {
                "snr": lambda: snr_fn(ref, hyp),
                "sdr": lambda: sdr_fir(ref, hyp, taps=min(512, max(1, ref.frame_count // 4))),
                "si_snr": lambda: si_snr(ref, hyp),
                "si_sdr": lambda: si_snr(ref, hyp, zero_mean=True),
                "stoi": lambda: stoi_fn(ref, hyp).value,
            }[m]()

        return state.jobs.submit("evaluation", len(pairs), work_pairs).to_json_dict()

    # --- schema ---

    @app.get("/api/v1/schema", dependencies=dep)
    def schema():
        return _SCHEMA

    return app


_SCHEMA = {
    "version": 1,
    "audio_entry": {
        "audio_id": "str", "filename": "str", "sha256": "hex", "duration_s": "float",
        "sample_rate": "int", "channels": "int", "clipped": "bool",
    },
    "feature_matrix": {
        "row_axis": "hz_linear|pitch_log|mel|chroma12|cepstral|scalar",
        "row_labels": "[float]", "frame_times": "[float]", "data": "[[float]] row-major",
    },
    "job": {
        "job_id": "str", "kind": "step|pipeline_run|evaluation",
        "state": "queued|running|done|failed",
        "progress": {"completed": "int", "total": "int"},
        "result": "object|null", "error": "str|null",
    },
    "pipeline": {
        "schema_version": "int", "name": "str", "description": "str",
        "created_at": "iso8601",
        "steps": [{
            "step_id": "str", "task": "ASR|ER|LI|SE|SS|SV|VAD|FEAT",
            "processor_id": "str", "params": "object",
            "inputs": [{"source": "int"}, {"step": "str", "slot": "int"}],
        }],
    },
    "run_report": {
        "run_id": "str", "created_at": "iso8601", "engine_version": "str",
        "pipeline": "pipeline", "inputs": [{"input_index": "int", "files": [{"name": "str", "sha256": "hex"}]}],
        "results": [{
            "input_index": "int", "input_name": "str",
            "steps": [{
                "step_id": "str", "task": "str", "processor_id": "str", "params": "object",
                "status": "done|failed|skipped", "duration_ms": "float",
                "outputs": "[slot outputs]", "error": "str|null", "rating": "1..10|null",
            }],
        }],
    },
    "evaluation_report": {
        "rows": [{"id": "str", "metrics": "object", "error": "str?"}],
        "aggregates": "object", "config": "object",
    },
}


def serve(
    port: int,
    data_dir,
    catalog_path=None,
    token: str | None = None,
    host: str = "127.0.0.1",
):
    """Run the service under uvicorn (blocking)."""
    import uvicorn

    app = create_app(data_dir, catalog_path=catalog_path, token=token)
    uvicorn.run(app, host=host, port=port, log_level="warning")
