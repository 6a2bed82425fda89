"""Built-in classical baselines.

These make every workflow executable and testable offline, with no model
weights: an energy VAD, a spectral-subtraction enhancer, a deterministic
band-split "separator", and the feature extractor. All are pure functions of
their inputs (byte-exact reproducible).
"""
from __future__ import annotations

import numpy as np
from scipy.signal import firwin

from ..audio import AudioClip, FrameGrid, frame_signal, window_coefficients
from ..errors import EmptyAudio, TooShort, UnknownProcessor
from ..featureset import compute_feature
from .types import OutputSlot, ProcessorDescriptor, StepOutput, TaskKind

__all__ = [
    "BUILTINS",
    "run_builtin",
    "run_builtin_vad",
    "run_builtin_enhancer",
    "run_builtin_mock_separator",
]


def run_builtin_vad(
    clip: AudioClip,
    frame_ms: float = 25.0,
    hop_ms: float = 10.0,
    threshold_db: float = 30.0,
    min_speech_ms: float = 200.0,
    min_gap_ms: float = 100.0,
) -> list[StepOutput]:
    """Energy VAD: frames within ``threshold_db`` of the loudest frame are
    speech; gaps shorter than min_gap merge, runs shorter than min_speech drop.

    Returns the segment list plus the concatenation of the speech regions.
    """
    y = clip.mono().astype(np.float64)
    if y.size == 0:
        raise EmptyAudio("cannot run VAD on an empty clip")
    sr = clip.sample_rate
    frame_n = max(1, round(frame_ms * sr / 1000.0))
    hop_n = max(1, round(hop_ms * sr / 1000.0))
    if y.size < frame_n:
        frames = y[None, :]
    else:
        count = 1 + (y.size - frame_n) // hop_n
        idx = np.arange(count)[:, None] * hop_n + np.arange(frame_n)[None, :]
        frames = y[idx]
    energy = np.sqrt((frames ** 2).mean(axis=1))
    peak = energy.max()
    segments: list[dict] = []
    if peak > 0:
        speech = energy >= peak * 10.0 ** (-threshold_db / 20.0)
        hop_s = hop_n / sr
        runs = _runs(speech)
        raw = [{"start_s": i0 * hop_s, "end_s": (i1 + 1) * hop_s} for i0, i1 in runs]
        merged: list[dict] = []
        for seg in raw:
            if merged and seg["start_s"] - merged[-1]["end_s"] < min_gap_ms / 1000.0:
                merged[-1]["end_s"] = seg["end_s"]
            else:
                merged.append(dict(seg))
        segments = [
            s for s in merged if s["end_s"] - s["start_s"] >= min_speech_ms / 1000.0
        ]
        for s in segments:
            s["end_s"] = min(s["end_s"], clip.duration_s)
    if segments:
        pieces = [
            y[round(s["start_s"] * sr):round(s["end_s"] * sr)] for s in segments
        ]
        speech_audio = np.concatenate(pieces)
    else:
        speech_audio = np.zeros(0)
    return [
        StepOutput("segments", "segments", segments),
        StepOutput("speech", "audio", AudioClip(speech_audio.astype(np.float32)[None, :], sr)),
    ]


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Maximal (first, last) index runs of True values."""
    out = []
    start = None
    for i, flag in enumerate(mask):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            out.append((start, i - 1))
            start = None
    if start is not None:
        out.append((start, len(mask) - 1))
    return out


_ENH_NFFT = 512
_ENH_HOP = 128


def run_builtin_enhancer(
    clip: AudioClip,
    noise_head_ms: float = 300.0,
    oversubtract: float = 1.5,
    floor: float = 0.02,
) -> list[StepOutput]:
    """Spectral subtraction against a noise profile from the leading
    ``noise_head_ms``: magnitude max(|S| - oversubtract*noise, floor*|S|),
    original phase, weighted overlap-add back to the exact input length.
    """
    y = clip.mono().astype(np.float64)
    sr = clip.sample_rate
    noise_n = round(noise_head_ms * sr / 1000.0)
    if y.size <= noise_n:
        raise TooShort(f"clip ({y.size / sr:.3f} s) not longer than noise head")
    if noise_n < _ENH_NFFT:
        raise TooShort(
            f"noise head must cover one analysis frame ({_ENH_NFFT} samples at {sr} Hz)"
        )
    w = window_coefficients("hann", _ENH_NFFT)
    head_grid = FrameGrid(_ENH_NFFT, _ENH_HOP, "hann", center=False)
    head_frames, _ = frame_signal(y[:noise_n], head_grid)
    noise_mag = np.abs(np.fft.rfft(head_frames * w, axis=1)).mean(axis=0)

    grid = FrameGrid(_ENH_NFFT, _ENH_HOP, "hann", center=True)
    frames, starts = frame_signal(y, grid)
    spec = np.fft.rfft(frames * w, axis=1)
    mag = np.abs(spec)
    phase = np.where(mag > 0, spec / np.where(mag > 0, mag, 1.0), 0.0)
    cleaned = np.maximum(mag - oversubtract * noise_mag[None, :], floor * mag)
    frames_out = np.fft.irfft(cleaned * phase, n=_ENH_NFFT, axis=1)

    pad = _ENH_NFFT // 2
    total = y.size + 2 * pad
    acc = np.zeros(total)
    den = np.zeros(total)
    for i, s in enumerate(starts):
        acc[s:s + _ENH_NFFT] += frames_out[i] * w
        den[s:s + _ENH_NFFT] += w ** 2
    out = np.where(den > 1e-12, acc / np.where(den > 1e-12, den, 1.0), 0.0)
    out = out[pad:pad + y.size]
    return [StepOutput("audio", "audio", AudioClip(out.astype(np.float32)[None, :], sr))]


_SEP_TAPS = 255
_SEP_F_LO = 100.0


def run_builtin_mock_separator(clip: AudioClip, n_sources: int = 3) -> list[StepOutput]:
    """Deterministic complementary band split into 2 or 3 sources.

    Linear-phase FIR bank built by lowpass differencing, so the filters sum
    to an exact centered impulse and the outputs sum to the input.
    """
    if n_sources not in (2, 3):
        raise ValueError(f"n_sources must be 2 or 3, got {n_sources}")
    y = clip.mono().astype(np.float64)
    if y.size == 0:
        raise EmptyAudio("cannot separate an empty clip")
    sr = clip.sample_rate
    nyquist = sr / 2.0
    edges = [
        _SEP_F_LO * (nyquist / _SEP_F_LO) ** (k / n_sources) for k in range(1, n_sources)
    ]
    lowpasses = [firwin(_SEP_TAPS, e / nyquist) for e in edges]
    delta = np.zeros(_SEP_TAPS)
    delta[_SEP_TAPS // 2] = 1.0
    bank = [lowpasses[0]]
    for k in range(1, n_sources - 1):
        bank.append(lowpasses[k] - lowpasses[k - 1])
    bank.append(delta - lowpasses[-1])
    outputs = []
    half = _SEP_TAPS // 2
    padded = np.pad(y, half)
    for i, h in enumerate(bank):
        filtered = np.convolve(padded, h)[2 * half:2 * half + y.size]
        outputs.append(
            StepOutput(f"source_{i}", "audio", AudioClip(filtered.astype(np.float32)[None, :], sr))
        )
    return outputs


def _run_feat(clip: AudioClip, params: dict) -> list[StepOutput]:
    params = dict(params)
    feature = params.pop("feature", "mel_spectrogram")
    matrix = compute_feature(clip, feature, params)
    return [StepOutput("matrix", "matrix", matrix)]


BUILTINS: dict[str, ProcessorDescriptor] = {
    d.id: d
    for d in [
        ProcessorDescriptor(
            id="vad-energy",
            task=TaskKind.VAD,
            output_slots=(OutputSlot("segments", "segments"), OutputSlot("audio", "speech")),
            metadata={
                "system": "energy threshold VAD",
                "quality": "baseline",
                "params": {
                    "frame_ms": 25.0, "hop_ms": 10.0, "threshold_db": 30.0,
                    "min_speech_ms": 200.0, "min_gap_ms": 100.0,
                },
            },
        ),
        ProcessorDescriptor(
            id="enhance-specsub",
            task=TaskKind.SPEECH_ENHANCEMENT,
            output_slots=(OutputSlot("audio", "audio"),),
            metadata={
                "system": "spectral subtraction",
                "quality": "baseline",
                "params": {"noise_head_ms": 300.0, "oversubtract": 1.5, "floor": 0.02},
            },
        ),
        ProcessorDescriptor(
            id="sep-bands-2",
            task=TaskKind.SPEECH_SEPARATION,
            output_slots=(OutputSlot("audio", "source_0"), OutputSlot("audio", "source_1")),
            metadata={"system": "complementary band split", "quality": "baseline"},
        ),
        ProcessorDescriptor(
            id="sep-bands-3",
            task=TaskKind.SPEECH_SEPARATION,
            output_slots=(
                OutputSlot("audio", "source_0"),
                OutputSlot("audio", "source_1"),
                OutputSlot("audio", "source_2"),
            ),
            metadata={"system": "complementary band split", "quality": "baseline"},
        ),
        ProcessorDescriptor(
            id="feat-extract",
            task=TaskKind.FEATURE_EXTRACTION,
            output_slots=(OutputSlot("matrix", "matrix"),),
            metadata={"system": "feature catalog", "params": {"feature": "mel_spectrogram"}},
        ),
    ]
}

# slot names above intentionally differ from kinds where that reads better;
# the engine matches by name and checks kind.


def run_builtin(processor_id: str, clips: list[AudioClip], params: dict) -> list[StepOutput]:
    """Dispatch a built-in processor on materialized inputs."""
    params = dict(params or {})
    if processor_id == "vad-energy":
        return run_builtin_vad(clips[0], **_floats(params))
    if processor_id == "enhance-specsub":
        return run_builtin_enhancer(clips[0], **_floats(params))
    if processor_id == "sep-bands-2":
        return run_builtin_mock_separator(clips[0], n_sources=2)
    if processor_id == "sep-bands-3":
        return run_builtin_mock_separator(clips[0], n_sources=3)
    if processor_id == "feat-extract":
        return _run_feat(clips[0], params)
    raise UnknownProcessor(f"not a builtin processor: {processor_id}")


def _floats(params: dict) -> dict:
    return {k: float(v) for k, v in params.items()}
