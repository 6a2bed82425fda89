import json
import socket
import threading
import time

import pytest
import requests
import uvicorn

from daa.audio import encode_wav
from daa.pipeline import export_pipeline
from daa.service import create_app

from conftest import concat, noise, noisy_asr_pipeline, silence, tone, write_test_catalog


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


class LiveService:
    def __init__(self, tmp_path, token=None):
        catalog = write_test_catalog(tmp_path / "catalog.json")
        self.app = create_app(tmp_path / "data", catalog_path=catalog, token=token)
        self.port = _free_port()
        config = uvicorn.Config(self.app, host="127.0.0.1", port=self.port, log_level="error")
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    def __enter__(self):
        self.thread.start()
        deadline = time.monotonic() + 10
        while not self.server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("service did not start")
            time.sleep(0.02)
        self.base = f"http://127.0.0.1:{self.port}/api/v1"
        return self

    def __exit__(self, *exc):
        self.server.should_exit = True
        self.thread.join(timeout=5)

    def wait_job(self, session, job_id, timeout=60.0):
        deadline = time.monotonic() + timeout
        last = None
        progress_seen = []
        while time.monotonic() < deadline:
            r = session.get(f"{self.base}/jobs/{job_id}")
            r.raise_for_status()
            last = r.json()
            progress_seen.append(last["progress"]["completed"])
            if last["state"] in ("done", "failed"):
                # monotone progress
                assert progress_seen == sorted(progress_seen)
                return last
            time.sleep(0.05)
        raise TimeoutError(f"job {job_id} stuck: {last}")


@pytest.fixture(scope="module")
def live(tmp_path_factory):
    with LiveService(tmp_path_factory.mktemp("svc")) as svc:
        yield svc


@pytest.fixture(scope="module")
def http():
    with requests.Session() as s:
        yield s


def speech_clip():
    return concat(noise(duration_s=0.4, amplitude=0.02, seed=3),
                  tone(freq=330, duration_s=1.2, amplitude=0.6),
                  silence(0.4),
                  tone(freq=520, duration_s=1.0, amplitude=0.5))


def upload(live, http, clip, name="clip.wav"):
    wav = encode_wav(clip, bits="32f")
    r = http.post(f"{live.base}/audio", files={"file": (name, wav, "audio/wav")})
    assert r.status_code == 200, r.text
    return r.json()


class TestAudioRoutes:
    def test_upload_and_metadata(self, live, http):
        entry = upload(live, http, silence(1.0), "silence.wav")
        assert entry["duration_s"] == pytest.approx(1.0)
        assert entry["sample_rate"] == 16000
        assert entry["channels"] == 1

    def test_listing_exposes_content_hash(self, live, http):
        clip = tone(freq=777, duration_s=0.3)
        a = upload(live, http, clip, "one.wav")
        b = upload(live, http, clip, "two.wav")
        assert a["audio_id"] != b["audio_id"]
        assert a["sha256"] == b["sha256"]
        listing = http.get(f"{live.base}/audio").json()["items"]
        ids = {e["audio_id"] for e in listing}
        assert {a["audio_id"], b["audio_id"]} <= ids

    def test_download_roundtrip(self, live, http):
        clip = tone(freq=432, duration_s=0.2)
        entry = upload(live, http, clip)
        r = http.get(f"{live.base}/audio/{entry['audio_id']}")
        assert r.status_code == 200
        assert r.content == encode_wav(clip, bits="32f")

    def test_unknown_audio_404(self, live, http):
        assert http.get(f"{live.base}/audio/zzz").status_code == 404

    def test_non_wav_422(self, live, http):
        r = http.post(f"{live.base}/audio", files={"file": ("x.mp3", b"ID3garbage", "audio/mpeg")})
        assert r.status_code == 422


class TestFeatureRoutes:
    def test_catalog_lists_13_features(self, live, http):
        features = http.get(f"{live.base}/features").json()["features"]
        assert len(features) == 13
        names = {f["name"] for f in features}
        assert "mel_spectrogram" in names
        assert all("params" in f for f in features)

    def test_mel_matrix_json(self, live, http):
        entry = upload(live, http, silence(1.0))
        r = http.post(f"{live.base}/audio/{entry['audio_id']}/features/mel_spectrogram",
                      json={"n_mels": 32})
        assert r.status_code == 200
        doc = r.json()
        assert doc["row_axis"] == "mel"
        assert len(doc["row_labels"]) == 32
        assert len(doc["data"]) == 32

    def test_png_render(self, live, http):
        entry = upload(live, http, tone(duration_s=0.3))
        r = http.post(
            f"{live.base}/audio/{entry['audio_id']}/features/linear_power_spectrogram",
            params={"render": "png"}, json={},
        )
        assert r.status_code == 200
        assert r.content[:8] == b"\x89PNG\r\n\x1a\n"

    def test_unknown_feature_400(self, live, http):
        entry = upload(live, http, tone(duration_s=0.2))
        r = http.post(f"{live.base}/audio/{entry['audio_id']}/features/zcr", json={})
        assert r.status_code == 400


class TestRegistryRoutes:
    def test_tasks(self, live, http):
        tasks = http.get(f"{live.base}/tasks").json()["tasks"]
        assert {t["code"] for t in tasks} == {"ASR", "ER", "LI", "SE", "SS", "SV", "VAD", "FEAT"}

    def test_models_for_vad(self, live, http):
        models = http.get(f"{live.base}/tasks/VAD/models").json()["models"]
        assert any(m["id"] == "vad-energy" for m in models)

    def test_unknown_task_404(self, live, http):
        assert http.get(f"{live.base}/tasks/NOPE/models").status_code == 404


class TestPipelineRoutes:
    def test_crud_run_report_rating_happy_path(self, live, http):
        doc = json.loads(export_pipeline(noisy_asr_pipeline()).decode())
        r = http.post(f"{live.base}/pipelines", json=doc)
        assert r.status_code == 200, r.text
        pid = r.json()["pipeline_id"]

        got = http.get(f"{live.base}/pipelines/{pid}").json()
        assert got["name"] == "noisy-environment-asr"
        listing = http.get(f"{live.base}/pipelines").json()["items"]
        assert any(p["pipeline_id"] == pid for p in listing)

        entry = upload(live, http, speech_clip(), "speech.wav")
        r = http.post(f"{live.base}/pipelines/{pid}/run", json={"audio_ids": [entry["audio_id"]]})
        assert r.status_code == 200, r.text
        job = live.wait_job(http, r.json()["job_id"])
        assert job["state"] == "done", job
        run_id = job["result"]["run_id"]

        report = http.get(f"{live.base}/runs/{run_id}/report", params={"format": "json"}).json()
        statuses = [s["status"] for sec in report["results"] for s in sec["steps"]]
        assert statuses == ["done"] * 4
        md = http.get(f"{live.base}/runs/{run_id}/report", params={"format": "markdown"})
        assert "hello world" in md.text

        r = http.post(f"{live.base}/runs/{run_id}/ratings",
                      json={"input_index": 0, "step_id": "asr", "rating": 8})
        assert r.status_code == 200
        assert {"input_index": 0, "step_id": "asr", "rating": 8} in r.json()["ratings"]
        again = http.get(f"{live.base}/runs/{run_id}/report").json()
        asr = [s for s in again["results"][0]["steps"] if s["step_id"] == "asr"][0]
        assert asr["rating"] == 8

    def test_cyclic_pipeline_400_with_violations(self, live, http):
        doc = json.loads(export_pipeline(noisy_asr_pipeline()).decode())
        doc["steps"][0]["inputs"] = [{"step": "vad", "slot": 1}]
        r = http.post(f"{live.base}/pipelines", json=doc)
        assert r.status_code == 400
        codes = {v["code"] for v in r.json()["violations"]}
        assert "Cycle" in codes

    def test_malformed_pipeline_400(self, live, http):
        r = http.post(f"{live.base}/pipelines", json={"schema_version": 1, "bogus": 1, "steps": []})
        assert r.status_code == 400

    def test_unknown_pipeline_404(self, live, http):
        assert http.get(f"{live.base}/pipelines/missing").status_code == 404
        assert http.delete(f"{live.base}/pipelines/missing").status_code == 404

    def test_put_replaces(self, live, http):
        doc = json.loads(export_pipeline(noisy_asr_pipeline()).decode())
        pid = http.post(f"{live.base}/pipelines", json=doc).json()["pipeline_id"]
        doc["name"] = "renamed"
        r = http.put(f"{live.base}/pipelines/{pid}", json=doc)
        assert r.status_code == 200
        assert http.get(f"{live.base}/pipelines/{pid}").json()["name"] == "renamed"

    def test_delete(self, live, http):
        doc = json.loads(export_pipeline(noisy_asr_pipeline()).decode())
        pid = http.post(f"{live.base}/pipelines", json=doc).json()["pipeline_id"]
        assert http.delete(f"{live.base}/pipelines/{pid}").status_code == 200
        assert http.get(f"{live.base}/pipelines/{pid}").status_code == 404

    def test_single_step_run(self, live, http):
        entry = upload(live, http, speech_clip())
        body = {
            "step_spec": {
                "step_id": "feat", "task": "FEAT", "processor_id": "feat-extract",
                "params": {"feature": "mfcc"}, "inputs": [{"source": 0}],
            },
            "audio_ids": [entry["audio_id"]],
        }
        r = http.post(f"{live.base}/steps/run", json=body)
        assert r.status_code == 200, r.text
        job = live.wait_job(http, r.json()["job_id"])
        assert job["state"] == "done"
        report = http.get(f"{live.base}/runs/{job['result']['run_id']}/report").json()
        out = report["results"][0]["steps"][0]["outputs"][0]
        assert out["kind"] == "matrix"
        assert out["row_axis"] == "cepstral"


class TestEvaluateRoute:
    def test_inline_text_pairs(self, live, http):
        body = {
            "metrics": ["wer", "cer"],
            "pairs": [{"id": "u1", "reference": "the cat sat", "hypothesis": "the cat sit on"}],
        }
        r = http.post(f"{live.base}/evaluate", json=body)
        assert r.status_code == 200
        job = live.wait_job(http, r.json()["job_id"])
        assert job["state"] == "done"
        row = job["result"]["report"]["rows"][0]
        assert row["metrics"]["wer"] == pytest.approx(2 / 3)

    def test_manifest_csv(self, live, http):
        body = {
            "metrics": ["wer"],
            "manifest_csv": "id,reference,hypothesis\nx,hello,hello\ny,hello,world\n",
        }
        job = live.wait_job(http, http.post(f"{live.base}/evaluate", json=body).json()["job_id"])
        assert job["state"] == "done"
        assert job["result"]["report"]["aggregates"]["wer"] == pytest.approx(0.5)

    def test_unknown_metric_400(self, live, http):
        r = http.post(f"{live.base}/evaluate", json={"metrics": ["zcr"], "pairs": []})
        assert r.status_code == 400


class TestSchemaAndAuth:
    def test_schema_route(self, live, http):
        doc = http.get(f"{live.base}/schema").json()
        assert "run_report" in doc and "pipeline" in doc

    def test_token_enforced(self, tmp_path):
        with LiveService(tmp_path, token="sekrit") as svc:
            base = svc.base
            r = requests.get(f"{base}/tasks")
            assert r.status_code == 401
            r = requests.get(f"{base}/tasks", headers={"Authorization": "Bearer wrong"})
            assert r.status_code == 401
            r = requests.get(f"{base}/tasks", headers={"Authorization": "Bearer sekrit"})
            assert r.status_code == 200
