import json
import sys
from pathlib import Path

import numpy as np
import pytest

from daa.audio import AudioClip, synth
from daa.pipeline.spec import InputBinding, PipelineSpec, StepSpec
from daa.processors.registry import registry_load
from daa.processors.types import TaskKind

ADAPTER_DIR = Path(__file__).parent / "adapters"


def tone(freq=440.0, duration_s=1.0, sample_rate=16000, amplitude=0.8):
    return synth("sine", freq=freq, amplitude=amplitude,
                 duration_s=duration_s, sample_rate=sample_rate)


def noise(duration_s=1.0, sample_rate=16000, amplitude=0.5, seed=0):
    return synth("white_noise", amplitude=amplitude, duration_s=duration_s,
                 sample_rate=sample_rate, seed=seed)


def silence(duration_s=1.0, sample_rate=16000):
    return synth("silence", duration_s=duration_s, sample_rate=sample_rate)


def concat(*clips):
    sr = clips[0].sample_rate
    assert all(c.sample_rate == sr for c in clips)
    return AudioClip(np.concatenate([c.mono() for c in clips])[None, :], sr)


@pytest.fixture
def three_segment_clip():
    """1 s tone, 1 s silence, 1 s tone at 16 kHz (VAD boundary fixture)."""
    return concat(tone(duration_s=1.0), silence(1.0), tone(duration_s=1.0))


def adapter_argv(name: str) -> list[str]:
    script = ADAPTER_DIR / f"{name}.py"
    assert script.exists(), script
    return [sys.executable, str(script)]


def write_test_catalog(path: Path, timeout_s: float = 30.0) -> Path:
    """Catalog with the external test adapters (LI labels, fixed ASR, echo,
    failing, sleeping)."""
    catalog = {
        "schema_version": 1,
        "models": [
            {
                "id": "li-fixed",
                "task": "LI",
                "exec": adapter_argv("li_adapter"),
                "timeout_s": timeout_s,
                "metadata": {"system": "fixture"},
            },
            {
                "id": "asr-fixed",
                "task": "ASR",
                "exec": adapter_argv("asr_adapter"),
                "timeout_s": timeout_s,
                "metadata": {"system": "fixture"},
            },
            {
                "id": "echo-audio",
                "task": "SE",
                "exec": adapter_argv("echo_adapter"),
                "timeout_s": timeout_s,
                "metadata": {"system": "fixture"},
            },
            {
                "id": "asr-broken",
                "task": "ASR",
                "exec": adapter_argv("failing_adapter"),
                "timeout_s": timeout_s,
                "metadata": {"system": "fixture"},
            },
            {
                "id": "asr-sleepy",
                "task": "ASR",
                "exec": adapter_argv("sleepy_adapter"),
                "timeout_s": 1.0,
                "metadata": {"system": "fixture"},
            },
        ],
    }
    path.write_text(json.dumps(catalog, indent=2), encoding="utf-8")
    return path


@pytest.fixture
def test_catalog(tmp_path):
    return write_test_catalog(tmp_path / "catalog.json")


@pytest.fixture
def test_registry(test_catalog):
    return registry_load(test_catalog)


def separation_pipeline() -> PipelineSpec:
    """3-source separation -> per-source VAD -> per-branch LI + ASR (10 steps)."""
    steps = [
        StepSpec("sep", TaskKind.SPEECH_SEPARATION, "sep-bands-3",
                 inputs=(InputBinding(source=0),)),
    ]
    for i in range(3):
        steps.append(
            StepSpec(f"vad{i}", TaskKind.VAD, "vad-energy",
                     inputs=(InputBinding(step="sep", slot=i),))
        )
    for i in range(3):
        steps.append(
            StepSpec(f"li{i}", TaskKind.LANGUAGE_ID, "li-fixed",
                     inputs=(InputBinding(step=f"vad{i}", slot=1),))
        )
        steps.append(
            StepSpec(f"asr{i}", TaskKind.ASR, "asr-fixed",
                     inputs=(InputBinding(step=f"vad{i}", slot=1),))
        )
    return PipelineSpec(
        name="multi-speaker-multi-language-asr",
        steps=tuple(steps),
        description="separate up to three speakers, strip silence, identify language, transcribe",
        created_at="2026-01-01T00:00:00+00:00",
    )


def noisy_asr_pipeline() -> PipelineSpec:
    """Enhancement -> VAD -> LI + ASR (4 steps)."""
    steps = (
        StepSpec("enhance", TaskKind.SPEECH_ENHANCEMENT, "enhance-specsub",
                 inputs=(InputBinding(source=0),)),
        StepSpec("vad", TaskKind.VAD, "vad-energy",
                 inputs=(InputBinding(step="enhance", slot=0),)),
        StepSpec("li", TaskKind.LANGUAGE_ID, "li-fixed",
                 inputs=(InputBinding(step="vad", slot=1),)),
        StepSpec("asr", TaskKind.ASR, "asr-fixed",
                 inputs=(InputBinding(step="vad", slot=1),)),
    )
    return PipelineSpec(
        name="noisy-environment-asr",
        steps=steps,
        description="enhance, strip silence, identify language, transcribe",
        created_at="2026-01-01T00:00:00+00:00",
    )
