"""In-memory async job table backed by one worker pool.

States move queued -> running -> done | failed and never regress; progress is
monotone. Jobs are process-local (single-node service); their results
(runs, evaluation reports) persist in the data directory.
"""
from __future__ import annotations

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass


@dataclass
class JobRecord:
    job_id: str
    kind: str  # step | pipeline_run | evaluation
    state: str = "queued"
    completed: int = 0
    total: int = 0
    result: dict | None = None
    error: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "kind": self.kind,
            "state": self.state,
            "progress": {"completed": self.completed, "total": self.total},
            "result": self.result,
            "error": self.error,
        }


class JobTable:
    def __init__(self, width: int):
        self._pool = ThreadPoolExecutor(max_workers=width)
        self._lock = threading.Lock()
        self._jobs: dict[str, JobRecord] = {}

    def get(self, job_id: str) -> JobRecord | None:
        with self._lock:
            return self._jobs.get(job_id)

    def submit(self, kind: str, total: int, fn) -> JobRecord:
        """Queue ``fn(job)``; it returns the result dict or raises."""
        job = JobRecord(job_id=uuid.uuid4().hex[:12], kind=kind, total=total)
        with self._lock:
            self._jobs[job.job_id] = job

        def runner():
            with self._lock:
                job.state = "running"
            try:
                result = fn(job)
            except Exception as exc:  # surface any failure on the record
                with self._lock:
                    job.state = "failed"
                    job.error = str(exc)
                return
            with self._lock:
                job.result = result
                job.completed = max(job.completed, job.total)
                job.state = "done"

        self._pool.submit(runner)
        return job

    def bump(self, job: JobRecord, inc: int = 1):
        with self._lock:
            job.completed += inc

    def shutdown(self):
        self._pool.shutdown(wait=False, cancel_futures=True)
