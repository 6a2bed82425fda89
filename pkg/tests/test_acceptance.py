"""Acceptance criteria, one test per criterion.

Each test prints one PASS/FAIL line (visible with -s or on failure) and
enforces its wall-clock budget. The whole module runs with no web frontend
built or installed.
"""
import itertools
import json
import re
import time
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest
from scipy.signal import lfilter

from daa.audio import AudioClip, FrameGrid, synth
from daa.features import (
    FftParams,
    MelParams,
    chroma_cens,
    chroma_cqt,
    chroma_stft,
    dct_matrix,
    log_frequency_spectrogram,
    magnitude_spectrogram,
    mel_filterbank,
    rms,
    spectral_centroid,
)
from daa.featureset import power_spectrogram_linear
from daa.metrics.signal import DB_CAP, pit_assign, sdr_fir, si_snr
from daa.metrics.stoi import stoi
from daa.metrics.text import align, wer
from daa.pipeline import erase_volatile, execute, export_pipeline, import_pipeline, validate
from daa.pipeline.spec import InputBinding, PipelineSpec, StepSpec
from daa.processors.registry import registry_load, seed_catalog_path
from daa.processors.types import TaskKind

from conftest import (
    concat,
    noise,
    noisy_asr_pipeline,
    separation_pipeline,
    silence,
    tone,
    write_test_catalog,
)

DATA_DIR = Path(__file__).parent / "data"


class _Criterion:
    def __init__(self, name, budget_s):
        self.name = name
        self.budget_s = budget_s

    def __enter__(self):
        self.started = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.started
        status = "PASS" if exc_type is None and elapsed <= self.budget_s else "FAIL"
        print(f"ACCEPTANCE {status}: {self.name} ({elapsed:.2f}s / budget {self.budget_s:.0f}s)")
        if exc_type is None and elapsed > self.budget_s:
            raise AssertionError(f"{self.name} exceeded budget: {elapsed:.2f}s > {self.budget_s}s")
        return False


@lru_cache(maxsize=None)
def _oracle(ref: tuple, hyp: tuple) -> int:
    if not ref:
        return len(hyp)
    if not hyp:
        return len(ref)
    best = _oracle(ref[1:], hyp[1:]) + (0 if ref[0] == hyp[0] else 1)
    return min(best, _oracle(ref[1:], hyp) + 1, _oracle(ref, hyp[1:]) + 1)


def test_edit_distance_exhaustive_oracle():
    """align() distance == exhaustive minimal-edit search, all pairs of
    length <= 5 over {a,b,c} (includes the full 3^5 x 3^5 grid)."""
    with _Criterion("edit-distance oracle (132,496 pairs)", 60):
        seqs = [
            tuple(s)
            for n in range(6)
            for s in itertools.product("abc", repeat=n)
        ]
        assert len(seqs) == 364
        for ref in seqs:
            for hyp in seqs:
                a = align(ref, hyp)
                assert a.distance == _oracle(ref, hyp)
                assert a.substitutions + a.deletions <= len(ref)


def test_wer_worked_example():
    with _Criterion("WER worked example", 5):
        result = wer("the cat sat", "the cat sit on")
        assert result.rate * 100 == pytest.approx(66.67, abs=0.01)


def test_si_snr_scale_invariance():
    with _Criterion("SI-SNR scale invariance (20 seeded pairs)", 5):
        for seed in range(20):
            ref = np.random.default_rng(1000 + seed).normal(0, 0.3, 16000)
            est = ref + np.random.default_rng(2000 + seed).normal(0, 0.1, 16000)
            base = si_snr(ref, est)
            for alpha in (0.1, 1.0, 37.0):
                assert abs(si_snr(ref, alpha * est) - base) <= 1e-6


def test_sdr_fir_exactness():
    with _Criterion("sdr_fir exactness and taps=1 collapse", 5):
        ref = np.random.default_rng(42).uniform(-0.5, 0.5, 80000)
        ref[-16:] = 0.0
        h = np.array([0.9, -0.35, 0.2, 0.12, -0.08, 0.05, 0.03, -0.02])
        est = lfilter(h, [1.0], ref)
        assert sdr_fir(ref, est, taps=16) >= 100.0

        rng = np.random.default_rng(43)
        ref2 = rng.normal(0, 0.4, 40000)
        est2 = ref2 + rng.normal(0, 0.2, 40000)
        assert sdr_fir(ref2, est2, taps=1) == pytest.approx(
            si_snr(ref2, est2, zero_mean=False), abs=1e-9
        )


def test_pit_inverse_permutation_recovery():
    with _Criterion("PIT inverse-permutation recovery (3! x 10 seeds)", 5):
        for seed in range(10):
            rng = np.random.default_rng(3000 + seed)
            refs = [rng.normal(0, 0.3, 8000) for _ in range(3)]
            for sigma in itertools.permutations(range(3)):
                ests = [refs[sigma[j]] for j in range(3)]
                scores = pit_assign(refs, ests, taps=4)
                assert scores.permutation == tuple(np.argsort(sigma))
                assert scores.mean_si_sdr == DB_CAP


def _stoi_fixture(seed):
    rng = np.random.default_rng(seed)
    n = 3 * 16000
    carrier = rng.normal(0, 0.3, n)
    nodes = rng.uniform(0.2, 1.0, 30)
    envelope = np.interp(np.linspace(0, 29, n), np.arange(30), nodes)
    return AudioClip((carrier * envelope).astype(np.float32)[None, :], 16000)


def test_stoi_identity_and_scale():
    with _Criterion("STOI identity and scale invariance (5 fixtures)", 10):
        for seed in range(5):
            clip = _stoi_fixture(seed)
            self_score = stoi(clip, clip).value
            assert self_score == pytest.approx(1.0, abs=1e-6)
            doubled = AudioClip(clip.samples * 2.0, clip.sample_rate)
            assert abs(stoi(clip, doubled).value - self_score) <= 1e-6


def test_dsp_suite():
    with _Criterion("DSP suite (DCT/Parseval/chroma/log-freq/centroid/mel)", 30):
        # DCT-II orthonormality
        m = dct_matrix(2, 40, ortho=True)
        assert np.max(np.abs(m @ m.T - np.eye(40))) <= 1e-10

        # Parseval RMS agreement, rectangular non-overlapping frames
        clip = synth("white_noise", duration_s=0.256, sample_rate=16000, seed=77)
        n = 512
        grid = FrameGrid(n, n, "rectangular", center=False)
        sample_path = rms(clip=clip, grid=grid).data
        S = magnitude_spectrogram(clip, FftParams(n_fft=n, grid=grid, power=1))
        spec_path = rms(S=S, n_fft=n).data
        assert np.max(np.abs(spec_path - sample_path) / sample_path) <= 1e-6

        # 440 Hz -> pitch class A in all three chroma variants
        a4 = tone(freq=440, duration_s=1.5)
        grid2 = FrameGrid(2048, 512)
        mid = lambda fm: fm.data[:, fm.frames // 2]
        assert np.argmax(mid(chroma_stft(a4, FftParams()))) == 9
        assert np.argmax(mid(chroma_cqt(a4, grid2, n_bins=48))) == 9
        assert np.argmax(mid(chroma_cens(a4, grid2, n_bins=48))) == 9

        # log-frequency argmax at MIDI 69
        lf = log_frequency_spectrogram(a4, FftParams())
        assert lf.row_labels[np.argmax(lf.data[:, lf.frames // 2])] == 69.0

        # centroid of a bin-centered sine within one bin width
        sr, nfft = 16000, 2048
        f0 = 100 * sr / nfft
        spec = power_spectrogram_linear(
            tone(freq=f0), FftParams(n_fft=nfft, grid=FrameGrid(nfft, nfft, "rectangular", center=False), power=1)
        )
        cent = spectral_centroid(spec).data
        assert np.all(np.abs(cent - f0) <= sr / nfft)

        # mel filterbank coverage
        fb = mel_filterbank(16000, 512, MelParams(n_mels=40))
        freqs = np.arange(257) * 16000 / 512
        inside = (freqs > 0) & (freqs < 8000)
        assert np.all(fb[:, inside].sum(axis=0) > 0)


def _random_valid_spec(rng, registry) -> PipelineSpec:
    builtin_audio_producers = []
    steps = []
    n_steps = int(rng.integers(1, 7))
    choices = [
        ("enhance-specsub", TaskKind.SPEECH_ENHANCEMENT, [("audio", 0)]),
        ("sep-bands-2", TaskKind.SPEECH_SEPARATION, [("audio", 0), ("audio", 1)]),
        ("sep-bands-3", TaskKind.SPEECH_SEPARATION, [("audio", 0), ("audio", 1), ("audio", 2)]),
        ("vad-energy", TaskKind.VAD, [("audio", 1)]),
        ("feat-extract", TaskKind.FEATURE_EXTRACTION, []),
    ]
    for i in range(n_steps):
        pid, task, audio_slots = choices[int(rng.integers(0, len(choices)))]
        if builtin_audio_producers and rng.random() < 0.5:
            producer, slot = builtin_audio_producers[int(rng.integers(0, len(builtin_audio_producers)))]
            binding = InputBinding(step=producer, slot=slot)
        else:
            binding = InputBinding(source=0)
        sid = f"s{i}"
        steps.append(StepSpec(sid, task, pid, params={}, inputs=(binding,)))
        for _, slot in audio_slots:
            builtin_audio_producers.append((sid, slot))
    return PipelineSpec(name=f"random-{rng.integers(1e9)}", steps=tuple(steps),
                        created_at="2026-01-01T00:00:00+00:00")


def test_pipeline_engine(tmp_path):
    with _Criterion("pipeline engine (structures, roundtrip, determinism, containment)", 60):
        registry = registry_load(write_test_catalog(tmp_path / "catalog.json"))
        speech = concat(noise(duration_s=0.4, amplitude=0.02, seed=3),
                        tone(freq=330, duration_s=1.2, amplitude=0.6),
                        silence(0.4),
                        tone(freq=520, duration_s=1.0, amplitude=0.5))

        # multi-speaker structure: 10 step results per input
        sep_spec = separation_pipeline()
        assert validate(sep_spec, registry) == []
        report = execute(sep_spec, [speech], registry, out_dir=tmp_path / "r1")
        assert len(report.results[0]["steps"]) == 10
        assert all(s["status"] == "done" for s in report.results[0]["steps"])

        # noisy-environment structure end to end
        noisy_spec = noisy_asr_pipeline()
        report_noisy = execute(noisy_spec, [speech], registry, out_dir=tmp_path / "r2")
        assert [s["status"] for s in report_noisy.results[0]["steps"]] == ["done"] * 4
        texts = [o["text"] for s in report_noisy.results[0]["steps"]
                 for o in s["outputs"] if o["kind"] == "text"]
        assert texts == ["hello world"]

        # export/import identity on 100 random valid specs
        rng = np.random.default_rng(7)
        for _ in range(100):
            spec = _random_valid_spec(rng, registry)
            assert validate(spec, registry) == []
            assert import_pipeline(export_pipeline(spec)) == spec

        # determinism: two executions byte-equal after volatile erasure
        r_a = execute(sep_spec, [speech], registry, out_dir=tmp_path / "da")
        r_b = execute(sep_spec, [speech], registry, out_dir=tmp_path / "db")
        a = json.dumps(erase_volatile(r_a.to_json_dict()), sort_keys=True).encode()
        b = json.dumps(erase_volatile(r_b.to_json_dict()), sort_keys=True).encode()
        assert a == b

        # failure containment
        from daa.processors.registry import Registry
        from daa.processors.types import OutputSlot, ProcessorDescriptor

        from conftest import adapter_argv

        broken_se = ProcessorDescriptor(
            id="se-broken", task=TaskKind.SPEECH_ENHANCEMENT,
            output_slots=(OutputSlot("audio", "audio"),), provenance="external",
            exec_argv=tuple(adapter_argv("failing_adapter")), timeout_s=30.0,
        )
        registry2 = Registry(list(registry.list()) + [broken_se])
        contain = PipelineSpec(name="contain", steps=(
            StepSpec("broken", TaskKind.SPEECH_ENHANCEMENT, "se-broken",
                     inputs=(InputBinding(source=0),)),
            StepSpec("vad", TaskKind.VAD, "vad-energy",
                     inputs=(InputBinding(step="broken", slot=0),)),
            StepSpec("asr", TaskKind.ASR, "asr-fixed",
                     inputs=(InputBinding(step="vad", slot=1),)),
            StepSpec("sep", TaskKind.SPEECH_SEPARATION, "sep-bands-2",
                     inputs=(InputBinding(source=0),)),
        ), created_at="2026-01-01T00:00:00+00:00")
        rep = execute(contain, [speech], registry2, out_dir=tmp_path / "r3")
        statuses = {s["step_id"]: s["status"] for s in rep.results[0]["steps"]}
        assert statuses == {"broken": "failed", "vad": "skipped",
                            "asr": "skipped", "sep": "done"}


def test_adapter_protocol(tmp_path):
    with _Criterion("adapter protocol (echo, stderr, timeout)", 10):
        from daa.audio import load_wav, save_wav
        from daa.errors import AdapterFailed, AdapterTimeout
        from daa.processors.adapter import run_external
        from daa.processors.types import OutputSlot, ProcessorDescriptor

        from conftest import adapter_argv

        clip = synth("white_noise", amplitude=0.5, duration_s=0.3, seed=6)
        wav = tmp_path / "in.wav"
        save_wav(clip, wav, bits="32f")

        echo = ProcessorDescriptor(
            id="echo", task=TaskKind.SPEECH_ENHANCEMENT,
            output_slots=(OutputSlot("audio", "audio"),), provenance="external",
            exec_argv=tuple(adapter_argv("echo_adapter")), timeout_s=30.0,
        )
        out = run_external(echo, [wav], {}, tmp_path / "w1")
        assert np.array_equal(out[0].payload.samples, load_wav(wav).samples)

        broken = ProcessorDescriptor(
            id="broken", task=TaskKind.ASR,
            output_slots=(OutputSlot("text", "text"),), provenance="external",
            exec_argv=tuple(adapter_argv("failing_adapter")), timeout_s=30.0,
        )
        with pytest.raises(AdapterFailed) as err:
            run_external(broken, [wav], {}, tmp_path / "w2")
        assert "no such model" in err.value.stderr

        sleepy = ProcessorDescriptor(
            id="sleepy", task=TaskKind.ASR,
            output_slots=(OutputSlot("text", "text"),), provenance="external",
            exec_argv=tuple(adapter_argv("sleepy_adapter")), timeout_s=1.0,
        )
        started = time.monotonic()
        with pytest.raises(AdapterTimeout):
            run_external(sleepy, [wav], {}, tmp_path / "w3")
        assert time.monotonic() - started <= 2.0


def test_service_contract(tmp_path):
    with _Criterion("service contract (happy path + 4xx, live port)", 60):
        import requests

        from daa.audio import encode_wav
        from test_service import LiveService

        speech = concat(noise(duration_s=0.4, amplitude=0.02, seed=3),
                        tone(freq=330, duration_s=1.2, amplitude=0.6),
                        silence(0.4), tone(freq=520, duration_s=1.0, amplitude=0.5))
        with LiveService(tmp_path) as svc, requests.Session() as http:
            base = svc.base
            # upload
            r = http.post(f"{base}/audio",
                          files={"file": ("s.wav", encode_wav(speech, "32f"), "audio/wav")})
            assert r.status_code == 200
            audio_id = r.json()["audio_id"]
            # feature
            r = http.post(f"{base}/audio/{audio_id}/features/mel_spectrogram", json={})
            assert r.status_code == 200 and r.json()["row_axis"] == "mel"
            # pipeline CRUD
            doc = json.loads(export_pipeline(noisy_asr_pipeline()).decode())
            pid = http.post(f"{base}/pipelines", json=doc).json()["pipeline_id"]
            assert http.get(f"{base}/pipelines/{pid}").status_code == 200
            # run -> poll -> report
            job = http.post(f"{base}/pipelines/{pid}/run",
                            json={"audio_ids": [audio_id]}).json()
            final = svc.wait_job(http, job["job_id"])
            assert final["state"] == "done"
            run_id = final["result"]["run_id"]
            report = http.get(f"{base}/runs/{run_id}/report").json()
            assert [s["status"] for s in report["results"][0]["steps"]] == ["done"] * 4
            # rating
            r = http.post(f"{base}/runs/{run_id}/ratings",
                          json={"input_index": 0, "step_id": "asr", "rating": 9})
            assert r.status_code == 200
            # enumerated 4xx cases
            assert http.get(f"{base}/audio/none").status_code == 404
            assert http.get(f"{base}/pipelines/none").status_code == 404
            assert http.get(f"{base}/jobs/none").status_code == 404
            bad = dict(doc)
            bad["steps"] = [dict(doc["steps"][0], inputs=[{"step": "vad", "slot": 1}])]
            r = http.post(f"{base}/pipelines", json=bad)
            assert r.status_code == 400 and "violations" in r.json()
            r = http.post(f"{base}/audio", files={"file": ("x.bin", b"not audio", "application/octet-stream")})
            assert r.status_code == 422
            r = http.post(f"{base}/runs/{run_id}/ratings",
                          json={"input_index": 0, "step_id": "asr", "rating": 0})
            assert r.status_code == 400


def _parse_performance(cell: str):
    entries = []
    for part in cell.split(","):
        part = part.strip()
        split = None
        paren = re.match(r"^(.*)\((.+)\)$", part)
        if paren:
            part, split = paren.group(1).strip(), paren.group(2).strip()
        if "=" in part:
            metric, value = part.split("=", 1)
        else:
            metric, value = part.split(" ", 1)
        entries.append({"metric": metric.strip(), "value": value.strip(), "split": split})
    return entries


def test_catalog_fidelity():
    with _Criterion("catalog fidelity vs committed benchmark table", 5):
        table = json.loads((DATA_DIR / "table1_rows.json").read_text(encoding="utf-8"))
        registry = registry_load(seed_catalog_path())
        external = [d for d in registry.list() if d.provenance == "external"]
        assert len(external) == len(table) == 27
        unmatched = list(external)
        for row in table:
            expected = _parse_performance(row["performance"])
            matches = [
                d for d in unmatched
                if d.task.value == row["task"]
                and d.metadata.get("system") == row["system"]
                and d.metadata.get("training_dataset") == row["dataset"]
                and d.metadata.get("reported_performance") == expected
            ]
            assert matches, f"no catalog entry reproduces table row {row}"
            unmatched.remove(matches[0])
        assert unmatched == []
