"""Audio core: WAV decode/encode, channel mixdown, resampling, synthesis.

All values are immutable after construction; every function returns new
objects, so clips are safe to share between threads.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from math import gcd
from pathlib import Path

import numpy as np
from scipy.signal import firwin, resample_poly

from .errors import (
    CorruptHeader,
    EmptyAudio,
    FrequencyOutOfRange,
    IoFailure,
    UnsupportedFormat,
)

__all__ = [
    "AudioClip",
    "FrameGrid",
    "load_wav",
    "save_wav",
    "to_mono",
    "resample",
    "synth",
    "window_coefficients",
    "frame_signal",
]

_WAVE_FMT_PCM = 1
_WAVE_FMT_FLOAT = 3


@dataclass(frozen=True)
class AudioClip:
    """Decoded PCM audio: float32 samples shaped (channels, frames).

    Samples are nominally in [-1, 1]; ``clipped`` is set when decoding had to
    clamp out-of-range float data (clipped forensic material is flagged, not
    rejected).
    """

    samples: np.ndarray
    sample_rate: int
    clipped: bool = False

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float32)
        if arr.ndim == 1:
            arr = arr[np.newaxis, :]
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ValueError("samples must be (channels, frames) with channels >= 1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        object.__setattr__(self, "samples", arr)

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @property
    def frame_count(self) -> int:
        return self.samples.shape[1]

    @property
    def duration_s(self) -> float:
        return self.frame_count / self.sample_rate

    def mono(self) -> np.ndarray:
        """1-D sample view; requires a single-channel clip."""
        if self.channels != 1:
            raise ValueError(f"expected mono clip, got {self.channels} channels")
        return self.samples[0]


@dataclass(frozen=True)
class FrameGrid:
    """Framing parameters shared by every frame-wise transform."""

    frame_length: int = 2048
    hop_length: int = 512
    window: str = "hann"
    center: bool = True

    def __post_init__(self):
        if not (0 < self.hop_length <= self.frame_length):
            raise ValueError("require 0 < hop_length <= frame_length")
        w = window_coefficients(self.window, self.frame_length)
        if w.sum() <= 0:
            raise ValueError(f"window {self.window!r} of length {self.frame_length} sums to 0")


def window_coefficients(kind: str, n: int) -> np.ndarray:
    """Periodic (DFT-even) analysis window of length ``n``."""
    k = np.arange(n)
    if kind == "hann":
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * k / n)
    if kind == "hamming":
        return 0.54 - 0.46 * np.cos(2.0 * np.pi * k / n)
    if kind == "rectangular":
        return np.ones(n)
    raise ValueError(f"unknown window {kind!r}")


def frame_signal(y: np.ndarray, grid: FrameGrid) -> tuple[np.ndarray, np.ndarray]:
    """Slice ``y`` into overlapping frames.

    Returns (frames, start_indices) where frames has shape
    (n_frames, frame_length) and start_indices are positions in the *padded*
    signal. With center=True the signal is reflect-padded by frame_length//2
    on both sides so frame t is centered at t*hop.
    """
    y = np.asarray(y, dtype=np.float64)
    pad = grid.frame_length // 2 if grid.center else 0
    if pad:
        y = np.pad(y, pad, mode="reflect") if y.size > 1 else np.pad(y, pad, mode="edge")
    n = y.size
    if n < grid.frame_length:
        raise EmptyAudio(
            f"signal of {n} samples is shorter than one frame ({grid.frame_length})"
        )
    n_frames = 1 + (n - grid.frame_length) // grid.hop_length
    starts = np.arange(n_frames) * grid.hop_length
    view = np.lib.stride_tricks.sliding_window_view(y, grid.frame_length)
    return view[starts].copy(), starts


def frame_times(n_frames: int, grid: FrameGrid, sample_rate: int) -> np.ndarray:
    """Column timestamps in seconds: frame centers on the original timeline."""
    t = np.arange(n_frames) * grid.hop_length
    if not grid.center:
        t = t + grid.frame_length / 2.0
    return t / float(sample_rate)


# --- WAV container ---

def load_wav(path) -> AudioClip:
    """Decode a RIFF/WAVE file (PCM 16/24/32-bit int or 32-bit float, 1-8 ch).

    Integer samples are scaled by 1/2^(bits-1); float data outside [-1, 1] is
    clamped and the clip flagged.
    """
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return decode_wav(raw)


def decode_wav(raw: bytes) -> AudioClip:
    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise CorruptHeader("not a RIFF/WAVE file")
    pos = 12
    fmt = None
    data = None
    while pos + 8 <= len(raw):
        cid = raw[pos:pos + 4]
        (size,) = struct.unpack_from("<I", raw, pos + 4)
        body = raw[pos + 8:pos + 8 + size]
        if cid == b"fmt ":
            if len(body) < 16:
                raise CorruptHeader("fmt chunk truncated")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data":
            if len(body) < size:
                raise CorruptHeader("data chunk truncated")
            data = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned
    if fmt is None:
        raise CorruptHeader("missing fmt chunk")
    if data is None:
        raise CorruptHeader("missing data chunk")

    audio_format, channels, sample_rate, _, block_align, bits = fmt
    if audio_format not in (_WAVE_FMT_PCM, _WAVE_FMT_FLOAT):
        raise UnsupportedFormat(f"wav codec {audio_format} not supported (PCM/float only)")
    if not 1 <= channels <= 8:
        raise UnsupportedFormat(f"{channels} channels outside supported 1-8")
    if audio_format == _WAVE_FMT_PCM and bits not in (16, 24, 32):
        raise UnsupportedFormat(f"{bits}-bit integer PCM not supported")
    if audio_format == _WAVE_FMT_FLOAT and bits != 32:
        raise UnsupportedFormat(f"{bits}-bit float not supported")
    if block_align != channels * (bits // 8):
        raise CorruptHeader("block alignment inconsistent with channels/bits")

    usable = (len(data) // block_align) * block_align
    n_frames = usable // block_align
    if n_frames == 0:
        raise EmptyAudio("wav file contains zero frames")
    data = data[:usable]

    clipped = False
    if audio_format == _WAVE_FMT_FLOAT:
        flat = np.frombuffer(data, dtype="<f4").astype(np.float32)
        if not np.all(np.isfinite(flat)):
            raise CorruptHeader("float wav contains non-finite samples")
        peak = np.max(np.abs(flat)) if flat.size else 0.0
        if peak > 1.0:
            flat = np.clip(flat, -1.0, 1.0)
            clipped = True
    elif bits == 16:
        flat = np.frombuffer(data, dtype="<i2").astype(np.float32) / 32768.0
    elif bits == 32:
        flat = (np.frombuffer(data, dtype="<i4").astype(np.float64) / 2147483648.0).astype(np.float32)
    else:  # 24-bit packed
        b = np.frombuffer(data, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        val = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        val -= (val & 0x800000) << 1  # sign extend
        flat = (val.astype(np.float64) / 8388608.0).astype(np.float32)

    samples = flat.reshape(n_frames, channels).T
    return AudioClip(samples=samples, sample_rate=sample_rate, clipped=clipped)


def save_wav(clip: AudioClip, path, bits=16) -> None:
    """Write ``clip`` as PCM16 (bits=16) or IEEE float32 (bits="32f")."""
    Path(path).write_bytes(encode_wav(clip, bits))


def encode_wav(clip: AudioClip, bits=16) -> bytes:
    interleaved = clip.samples.T  # (frames, channels)
    if bits == 16:
        ints = np.clip(np.rint(interleaved.astype(np.float64) * 32768.0), -32768, 32767)
        payload = ints.astype("<i2").tobytes()
        fmt_code, bps = _WAVE_FMT_PCM, 16
    elif bits == "32f":
        payload = interleaved.astype("<f4").tobytes()
        fmt_code, bps = _WAVE_FMT_FLOAT, 32
    else:
        raise ValueError(f"bits must be 16 or '32f', got {bits!r}")
    block_align = clip.channels * (bps // 8)
    fmt = struct.pack(
        "<HHIIHH", fmt_code, clip.channels, clip.sample_rate,
        clip.sample_rate * block_align, block_align, bps,
    )
    chunks = b"WAVE" + _chunk(b"fmt ", fmt) + _chunk(b"data", payload)
    return _chunk(b"RIFF", chunks)


def _chunk(cid: bytes, body: bytes) -> bytes:
    padded = body + (b"\x00" if len(body) & 1 else b"")
    return cid + struct.pack("<I", len(body)) + padded


# --- conversions ---

def to_mono(clip: AudioClip) -> AudioClip:
    """Unweighted mean across channels; identity for mono input."""
    if clip.channels == 1:
        return clip
    mixed = clip.samples.astype(np.float64).mean(axis=0)
    return AudioClip(mixed.astype(np.float32), clip.sample_rate, clip.clipped)


_RESAMPLE_ZERO_CROSSINGS = 64
_RESAMPLE_KAISER_BETA = 8.6


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """Windowed-sinc polyphase resampling (Kaiser window).

    Output length is round(frames * target/source). Identity when the rates
    are equal.
    """
    if target_rate < 1000:
        raise ValueError("target_rate must be >= 1000 Hz")
    sr = clip.sample_rate
    if target_rate == sr:
        return clip
    g = gcd(sr, int(target_rate))
    up, down = target_rate // g, sr // g
    half = _RESAMPLE_ZERO_CROSSINGS * max(up, down)
    h = firwin(2 * half + 1, 1.0 / max(up, down), window=("kaiser", _RESAMPLE_KAISER_BETA))
    n_out = (clip.frame_count * target_rate * 2 + sr) // (2 * sr)  # round(n*ratio)
    out = np.empty((clip.channels, n_out), dtype=np.float32)
    for ch in range(clip.channels):
        y = resample_poly(clip.samples[ch].astype(np.float64), up, down, window=h)
        if y.size < n_out:
            y = np.pad(y, (0, n_out - y.size), mode="edge")
        out[ch] = y[:n_out].astype(np.float32)
    return AudioClip(out, int(target_rate), clip.clipped)


def synth(kind: str, freq: float = 0.0, amplitude: float = 1.0,
          duration_s: float = 1.0, sample_rate: int = 16000, seed: int = 0) -> AudioClip:
    """Deterministic mono test signals: sine, white_noise, or silence.

    Sine phase starts at 0; noise is uniform in [-amplitude, amplitude],
    reproducible from ``seed``.
    """
    n = int(round(duration_s * sample_rate))
    if kind == "sine":
        if not 0 < freq < sample_rate / 2:
            raise FrequencyOutOfRange(
                f"sine frequency {freq} Hz outside (0, {sample_rate / 2}) at {sample_rate} Hz"
            )
        t = np.arange(n, dtype=np.float64) / sample_rate
        y = amplitude * np.sin(2.0 * np.pi * freq * t)
    elif kind == "white_noise":
        rng = np.random.default_rng(seed)
        y = rng.uniform(-amplitude, amplitude, size=n)
    elif kind == "silence":
        y = np.zeros(n)
    else:
        raise ValueError(f"unknown signal kind {kind!r}")
    return AudioClip(y.astype(np.float32), sample_rate)


def as_mono_f64(x) -> np.ndarray:
    """Coerce an AudioClip or 1-D array-like to float64 samples."""
    if isinstance(x, AudioClip):
        return x.mono().astype(np.float64)
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("expected a 1-D sample array")
    return arr
