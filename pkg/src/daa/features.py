"""Classical DSP feature transforms.

Everything here is a pure function from a mono :class:`~daa.audio.AudioClip`
(or a precomputed spectrogram) to a :class:`FeatureMatrix` — a rows-by-frames
real matrix with labelled axes that serializes to a documented JSON shape.

Conventions shared by all transforms:

* frames follow the clip's :class:`~daa.audio.FrameGrid` (reflect padding when
  ``center``), so every transform has ``1 + (len + pad - frame_length) // hop``
  columns;
* dB conversion is ``10*log10(max(x, 1e-10))`` clamped to ``[max - 80, max]``;
* degenerate frames (silence) map to documented conventions, never errors:
  centroid 0, chroma all-zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .audio import AudioClip, FrameGrid, frame_signal, frame_times, window_coefficients
from .errors import (
    BadBandCount,
    BandAboveNyquist,
    DimensionMismatch,
    EmptyAudio,
    NegativeMagnitude,
    NyquistExceeded,
    SizeTooSmall,
)

__all__ = [
    "FftParams",
    "MelParams",
    "FeatureMatrix",
    "stft",
    "power_to_db",
    "power_spectrogram",
    "log_frequency_spectrogram",
    "mel_filterbank",
    "mel_frequencies",
    "mel_spectrogram",
    "dct_matrix",
    "mfcc",
    "cqt",
    "cqt_frequencies",
    "chroma_stft",
    "chroma_cqt",
    "chroma_cens",
    "rms",
    "spectral_centroid",
    "spectral_bandwidth",
    "spectral_contrast",
]

DB_AMIN = 1e-10
DB_TOP = 80.0

ROW_AXES = ("hz_linear", "pitch_log", "mel", "chroma12", "cepstral", "scalar")

C1_HZ = 32.703  # MIDI 24, the reference for pitch/chroma binning


@dataclass(frozen=True)
class FftParams:
    """STFT configuration: transform size, framing grid and magnitude power."""

    n_fft: int = 2048
    grid: FrameGrid = field(default_factory=FrameGrid)
    power: int = 2

    def __post_init__(self):
        if self.n_fft < 2 or self.n_fft & (self.n_fft - 1):
            raise ValueError(f"n_fft must be a power of two, got {self.n_fft}")
        if self.grid.frame_length > self.n_fft:
            raise ValueError("frame_length must not exceed n_fft")
        if self.power not in (1, 2):
            raise ValueError("power must be 1 (amplitude) or 2 (power)")

    @property
    def bins(self) -> int:
        return self.n_fft // 2 + 1

    def bin_frequencies(self, sample_rate: int) -> np.ndarray:
        return np.arange(self.bins) * sample_rate / self.n_fft


@dataclass(frozen=True)
class MelParams:
    """Mel filterbank construction parameters. f_max=None means sr/2."""

    n_mels: int = 40
    f_min: float = 0.0
    f_max: float | None = None
    norm: str = "slaney_area"

    def __post_init__(self):
        if self.n_mels < 2:
            raise ValueError("n_mels must be >= 2")
        if self.f_min < 0:
            raise ValueError("f_min must be >= 0")
        if self.norm not in ("slaney_area", "none"):
            raise ValueError(f"unknown mel norm {self.norm!r}")

    def resolve_f_max(self, sample_rate: int) -> float:
        f_max = sample_rate / 2 if self.f_max is None else self.f_max
        if not self.f_min < f_max <= sample_rate / 2:
            raise ValueError(f"need f_min < f_max <= sr/2, got [{self.f_min}, {f_max}]")
        return f_max


@dataclass(frozen=True)
class FeatureMatrix:
    """A labelled rows-by-frames matrix; the unit every feature produces."""

    data: np.ndarray
    row_axis: str
    row_labels: np.ndarray
    frame_times: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        labels = np.asarray(self.row_labels, dtype=np.float64)
        times = np.asarray(self.frame_times, dtype=np.float64)
        if self.row_axis not in ROW_AXES:
            raise ValueError(f"unknown row_axis {self.row_axis!r}")
        if data.ndim != 2:
            raise ValueError("data must be 2-D (rows, frames)")
        if not np.all(np.isfinite(data)):
            raise ValueError("feature matrix entries must be finite")
        if data.shape[0] != labels.size or data.shape[1] != times.size:
            raise ValueError("row_labels/frame_times lengths must match data shape")
        if self.row_axis == "chroma12" and data.shape[0] != 12:
            raise ValueError("chroma12 matrices must have 12 rows")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "row_labels", labels)
        object.__setattr__(self, "frame_times", times)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def frames(self) -> int:
        return self.data.shape[1]

    def to_json_dict(self) -> dict:
        return {
            "row_axis": self.row_axis,
            "row_labels": [float(v) for v in self.row_labels],
            "frame_times": [float(v) for v in self.frame_times],
            "data": [[float(v) for v in row] for row in self.data],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "FeatureMatrix":
        return cls(
            data=np.asarray(obj["data"], dtype=np.float64),
            row_axis=obj["row_axis"],
            row_labels=np.asarray(obj["row_labels"], dtype=np.float64),
            frame_times=np.asarray(obj["frame_times"], dtype=np.float64),
        )


# --- STFT and spectrograms ---

def stft(clip: AudioClip, params: FftParams) -> np.ndarray:
    """One-sided STFT, shape (n_fft/2 + 1, frames).

    Frames shorter than n_fft are zero-padded symmetrically (window centered
    in the transform buffer). Bin k sits at k*sr/n_fft Hz.
    """
    y = clip.mono().astype(np.float64)
    if y.size < 1:
        raise EmptyAudio("cannot transform an empty clip")
    grid = params.grid
    frames, _ = frame_signal(y, grid)
    w = window_coefficients(grid.window, grid.frame_length)
    fw = frames * w
    if params.n_fft > grid.frame_length:
        buf = np.zeros((fw.shape[0], params.n_fft))
        left = (params.n_fft - grid.frame_length) // 2
        buf[:, left:left + grid.frame_length] = fw
        fw = buf
    return np.fft.rfft(fw, n=params.n_fft, axis=1).T


def magnitude_spectrogram(clip: AudioClip, params: FftParams) -> np.ndarray:
    """|STFT|^power as a plain array (bins, frames)."""
    return np.abs(stft(clip, params)) ** params.power


def power_to_db(x: np.ndarray, amin: float = DB_AMIN, top_db: float = DB_TOP) -> np.ndarray:
    db = 10.0 * np.log10(np.maximum(np.asarray(x, dtype=np.float64), amin))
    return np.maximum(db, db.max() - top_db)


def power_spectrogram(clip: AudioClip, params: FftParams) -> FeatureMatrix:
    """Linear-frequency spectrogram in dB."""
    s = magnitude_spectrogram(clip, params)
    return FeatureMatrix(
        data=power_to_db(s),
        row_axis="hz_linear",
        row_labels=params.bin_frequencies(clip.sample_rate),
        frame_times=frame_times(s.shape[1], params.grid, clip.sample_rate),
    )


def hz_to_midi(f) -> np.ndarray:
    return 69.0 + 12.0 * np.log2(np.asarray(f, dtype=np.float64) / 440.0)


def midi_to_hz(p) -> np.ndarray:
    return 440.0 * 2.0 ** ((np.asarray(p, dtype=np.float64) - 69.0) / 12.0)


def log_frequency_spectrogram(clip: AudioClip, params: FftParams) -> FeatureMatrix:
    """Power spectrogram folded onto a semitone axis (12 bins/octave).

    Each FFT bin's power is summed into the semitone whose half-open pitch
    interval [p-0.5, p+0.5) contains the bin center; rows run from C1
    (MIDI 24) up to the Nyquist frequency and are labelled by MIDI number.
    """
    s = magnitude_spectrogram(clip, params)
    freqs = params.bin_frequencies(clip.sample_rate)
    midi_lo = 24
    midi_hi = int(np.floor(hz_to_midi(clip.sample_rate / 2)))
    n_rows = midi_hi - midi_lo + 1
    out = np.zeros((n_rows, s.shape[1]))
    positive = freqs > 0
    pitches = np.full(freqs.shape, -1, dtype=np.int64)
    pitches[positive] = np.floor(hz_to_midi(freqs[positive]) + 0.5).astype(np.int64)
    for k in np.nonzero(positive)[0]:
        row = pitches[k] - midi_lo
        if 0 <= row < n_rows:
            out[row] += s[k]
    return FeatureMatrix(
        data=power_to_db(out),
        row_axis="pitch_log",
        row_labels=np.arange(midi_lo, midi_hi + 1, dtype=np.float64),
        frame_times=frame_times(s.shape[1], params.grid, clip.sample_rate),
    )


# --- mel scale ---

_MEL_BREAK_HZ = 1000.0
_MEL_SLOPE = 200.0 / 3.0          # Hz per mel below the break
_MEL_LOGSTEP = np.log(6.4) / 27.0  # 27 bands span 1 kHz -> 6.4 kHz


def hz_to_mel(f) -> np.ndarray:
    f = np.asarray(f, dtype=np.float64)
    mel = f / _MEL_SLOPE
    above = f >= _MEL_BREAK_HZ
    if np.any(above):
        mel = np.where(
            above,
            _MEL_BREAK_HZ / _MEL_SLOPE + np.log(np.maximum(f, _MEL_BREAK_HZ) / _MEL_BREAK_HZ) / _MEL_LOGSTEP,
            mel,
        )
    return mel


def mel_to_hz(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    break_mel = _MEL_BREAK_HZ / _MEL_SLOPE
    f = m * _MEL_SLOPE
    above = m >= break_mel
    if np.any(above):
        f = np.where(above, _MEL_BREAK_HZ * np.exp(_MEL_LOGSTEP * (m - break_mel)), f)
    return f


def mel_frequencies(n: int, f_min: float, f_max: float) -> np.ndarray:
    """n frequencies uniformly spaced on the mel scale between f_min and f_max."""
    mels = np.linspace(hz_to_mel(f_min), hz_to_mel(f_max), n)
    return mel_to_hz(mels)


def triangle_weights(freqs: np.ndarray, lo: float, center: float, hi: float) -> np.ndarray:
    """Unit-apex triangle over [lo, hi] peaking at ``center``, sampled at freqs."""
    rising = (freqs - lo) / (center - lo)
    falling = (hi - freqs) / (hi - center)
    return np.maximum(0.0, np.minimum(rising, falling))


def mel_filterbank(sample_rate: int, n_fft: int, params: MelParams) -> np.ndarray:
    """Triangular mel filterbank, shape (n_mels, n_fft/2 + 1).

    Unit-apex triangles between consecutive mel breakpoints; slaney_area norm
    divides each filter by half its bandwidth in Hz (area-style equalization).
    """
    f_max = params.resolve_f_max(sample_rate)
    edges = mel_frequencies(params.n_mels + 2, params.f_min, f_max)
    freqs = np.arange(n_fft // 2 + 1) * sample_rate / n_fft
    bank = np.zeros((params.n_mels, freqs.size))
    for m in range(params.n_mels):
        bank[m] = triangle_weights(freqs, edges[m], edges[m + 1], edges[m + 2])
        if params.norm == "slaney_area":
            bank[m] *= 2.0 / (edges[m + 2] - edges[m])
    dead = np.nonzero(~bank.any(axis=1))[0]
    if dead.size:
        raise BadBandCount(
            f"{dead.size} mel filter(s) cover no FFT bin at n_fft={n_fft} "
            f"(first dead band {int(dead[0])}); reduce n_mels or raise n_fft"
        )
    return bank


def mel_spectrogram(
    clip: AudioClip | None,
    fft: FftParams,
    mel: MelParams,
    S: np.ndarray | None = None,
    sample_rate: int | None = None,
    to_db: bool = True,
) -> FeatureMatrix:
    """Mel-scaled spectrogram: filterbank dot |STFT|^power.

    Either pass a clip, or pass a precomputed magnitude spectrogram ``S``
    (bins x frames, already raised to ``fft.power``) with ``sample_rate``;
    the mapping is then applied without recomputing the STFT.
    """
    if S is None:
        if clip is None:
            raise ValueError("pass a clip or a precomputed spectrogram")
        sample_rate = clip.sample_rate
        S = magnitude_spectrogram(clip, fft)
        times = frame_times(S.shape[1], fft.grid, sample_rate)
    else:
        if sample_rate is None:
            raise ValueError("sample_rate is required with a precomputed spectrogram")
        S = np.asarray(S, dtype=np.float64)
        if S.shape[0] != fft.bins:
            raise DimensionMismatch(
                f"spectrogram has {S.shape[0]} bins, filterbank expects {fft.bins}"
            )
        times = frame_times(S.shape[1], fft.grid, sample_rate)
    bank = mel_filterbank(sample_rate, fft.n_fft, mel)
    data = bank @ S
    if to_db:
        data = power_to_db(data)
    centers = mel_frequencies(mel.n_mels + 2, mel.f_min, mel.resolve_f_max(sample_rate))[1:-1]
    return FeatureMatrix(
        data=data,
        row_axis="mel",
        row_labels=hz_to_mel(centers),
        frame_times=times,
    )


# --- DCT family ---

def dct_matrix(kind: int, n: int, ortho: bool = True) -> np.ndarray:
    """Dense DCT basis matrix of types I-IV (rows are basis functions).

    With ortho=True, types II/III/IV are orthonormal and III is the transpose
    of II; type IV is symmetric and its own inverse.
    """
    if kind not in (1, 2, 3, 4):
        raise ValueError(f"DCT kind must be 1..4, got {kind}")
    if n < 2 or (kind == 1 and n < 3):
        raise SizeTooSmall(f"DCT-{kind} needs n >= {3 if kind == 1 else 2}, got {n}")
    k = np.arange(n)[:, None].astype(np.float64)
    m = np.arange(n)[None, :].astype(np.float64)
    if kind == 1:
        mat = 2.0 * np.cos(np.pi * k * m / (n - 1))
        mat[:, 0] = 1.0
        mat[:, -1] = (-1.0) ** np.arange(n)
        if ortho:
            s = np.ones(n)
            s[0] = s[-1] = 1.0 / np.sqrt(2.0)
            mat = np.sqrt(2.0 / (n - 1)) * (s[:, None] * s[None, :]) * np.cos(np.pi * k * m / (n - 1))
    elif kind == 2:
        mat = 2.0 * np.cos(np.pi * k * (2 * m + 1) / (2 * n))
        if ortho:
            mat *= np.sqrt(1.0 / (2 * n))
            mat[0] *= 1.0 / np.sqrt(2.0)
    elif kind == 3:
        mat = 2.0 * np.cos(np.pi * (2 * k + 1) * m / (2 * n))
        mat[:, 0] = 1.0
        if ortho:
            mat = dct_matrix(2, n, ortho=True).T.copy()
    else:
        mat = 2.0 * np.cos(np.pi * (2 * k + 1) * (2 * m + 1) / (4 * n))
        if ortho:
            mat *= np.sqrt(1.0 / (2 * n))
    return mat


def mfcc(
    clip: AudioClip,
    fft: FftParams,
    mel: MelParams,
    n_mfcc: int = 20,
    dct_kind: int = 2,
) -> FeatureMatrix:
    """Cepstral coefficients: chosen DCT of the dB mel spectrogram.

    dct_kind selects the basis (default II, orthonormal) so different DCT
    families can be compared on the same signal.
    """
    if n_mfcc > mel.n_mels:
        raise ValueError(f"n_mfcc={n_mfcc} exceeds n_mels={mel.n_mels}")
    mel_db = mel_spectrogram(clip, fft, mel, to_db=True)
    basis = dct_matrix(dct_kind, mel.n_mels, ortho=True)
    coeffs = basis @ mel_db.data
    return FeatureMatrix(
        data=coeffs[:n_mfcc],
        row_axis="cepstral",
        row_labels=np.arange(n_mfcc, dtype=np.float64),
        frame_times=mel_db.frame_times,
    )


# --- constant-Q and chroma ---

def cqt_frequencies(f_min: float, bins_per_octave: int, n_bins: int) -> np.ndarray:
    return f_min * 2.0 ** (np.arange(n_bins) / bins_per_octave)


def cqt(
    clip: AudioClip,
    grid: FrameGrid | None = None,
    f_min: float = C1_HZ,
    bins_per_octave: int = 12,
    n_bins: int = 72,
) -> np.ndarray:
    """Direct constant-Q transform, shape (n_bins, frames), complex.

    Bin b correlates the signal with a Hann-windowed complex exponential at
    f_min * 2^(b/bins_per_octave); window length ceil(Q*sr/f_b) keeps the
    center-frequency-to-bandwidth ratio constant. Frames are centered at
    t*hop; output is normalized by the window sum. O(n_bins * len) by design:
    straightforward to verify, fast enough at desk scale.
    """
    y = clip.mono().astype(np.float64)
    if y.size < 1:
        raise EmptyAudio("cannot transform an empty clip")
    sr = clip.sample_rate
    freqs = cqt_frequencies(f_min, bins_per_octave, n_bins)
    if freqs[-1] >= sr / 2:
        raise NyquistExceeded(
            f"top CQT bin at {freqs[-1]:.1f} Hz reaches Nyquist ({sr / 2} Hz)"
        )
    hop = grid.hop_length if grid is not None else 512
    q = 1.0 / (2.0 ** (1.0 / bins_per_octave) - 1.0)
    lengths = np.ceil(q * sr / freqs).astype(int)
    n_frames = 1 + y.size // hop
    centers = np.arange(n_frames) * hop
    pad = int(lengths.max() // 2 + 1)
    ypad = np.pad(y, pad)
    out = np.empty((n_bins, n_frames), dtype=np.complex128)
    for b in range(n_bins):
        n_b = lengths[b]
        w = window_coefficients("hann", n_b)
        phase = np.exp(-2j * np.pi * freqs[b] / sr * np.arange(n_b))
        kernel = (w * phase) / w.sum()
        starts = centers - n_b // 2 + pad
        segs = np.lib.stride_tricks.sliding_window_view(ypad, n_b)[starts]
        out[b] = segs @ kernel
    return out


def _fold_pitch_classes(power: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    """Sum rows of ``power`` into 12 pitch classes by nearest semitone (C=0)."""
    out = np.zeros((12, power.shape[1]))
    for k, f in enumerate(freqs):
        if f <= 0:
            continue
        klass = int(np.floor(hz_to_midi(f) + 0.5)) % 12
        out[klass] += power[k]
    return out


def _max_normalize_frames(x: np.ndarray) -> np.ndarray:
    peaks = x.max(axis=0, keepdims=True)
    scale = np.where(peaks > 0, peaks, 1.0)
    return x / scale


def chroma_stft(clip: AudioClip, params: FftParams) -> FeatureMatrix:
    """STFT chromagram: bin power folded by pitch class, per-frame max = 1."""
    s = magnitude_spectrogram(clip, params)
    folded = _fold_pitch_classes(s, params.bin_frequencies(clip.sample_rate))
    return FeatureMatrix(
        data=_max_normalize_frames(folded),
        row_axis="chroma12",
        row_labels=np.arange(12, dtype=np.float64),
        frame_times=frame_times(s.shape[1], params.grid, clip.sample_rate),
    )


def chroma_cqt(
    clip: AudioClip,
    grid: FrameGrid | None = None,
    f_min: float = C1_HZ,
    bins_per_octave: int = 12,
    n_bins: int = 72,
) -> FeatureMatrix:
    """Constant-Q chromagram: CQT magnitudes folded per pitch class."""
    mags = np.abs(cqt(clip, grid, f_min, bins_per_octave, n_bins))
    freqs = cqt_frequencies(f_min, bins_per_octave, n_bins)
    folded = _fold_pitch_classes(mags, freqs)
    hop = grid.hop_length if grid is not None else 512
    times = np.arange(folded.shape[1]) * hop / clip.sample_rate
    return FeatureMatrix(
        data=_max_normalize_frames(folded),
        row_axis="chroma12",
        row_labels=np.arange(12, dtype=np.float64),
        frame_times=times,
    )


_CENS_THRESHOLDS = (0.05, 0.1, 0.2, 0.4)
_CENS_VALUES = (0.0, 0.25, 0.5, 0.75, 1.0)


def chroma_cens(
    clip: AudioClip,
    grid: FrameGrid | None = None,
    f_min: float = C1_HZ,
    bins_per_octave: int = 12,
    n_bins: int = 72,
    smooth_window: int = 41,
) -> FeatureMatrix:
    """Energy-normalized chroma: L1 norm, log-like quantization, Hann
    smoothing over ``smooth_window`` frames, then per-frame L2 norm.

    Robust to dynamics by construction: any per-frame gain cancels in the L1
    stage.
    """
    if smooth_window < 1 or smooth_window % 2 == 0:
        raise ValueError("smooth_window must be odd and >= 1")
    base = chroma_cqt(clip, grid, f_min, bins_per_octave, n_bins)
    x = base.data
    sums = x.sum(axis=0, keepdims=True)
    x = x / np.where(sums > 0, sums, 1.0)
    quant = np.zeros_like(x)
    for thr, val in zip(_CENS_THRESHOLDS, _CENS_VALUES[1:]):
        quant = np.where(x > thr, val, quant)
    # symmetric Hann without zero endpoints, unit sum; centered moving average
    w = np.hanning(smooth_window + 2)[1:-1]
    w = w / w.sum()
    half = smooth_window // 2
    smoothed = np.vstack(
        [np.convolve(row, w, mode="full")[half:half + quant.shape[1]] for row in quant]
    )
    norms = np.sqrt((smoothed ** 2).sum(axis=0, keepdims=True))
    out = smoothed / np.where(norms > 0, norms, 1.0)
    return FeatureMatrix(
        data=out,
        row_axis="chroma12",
        row_labels=base.row_labels,
        frame_times=base.frame_times,
    )


# --- frame statistics ---

def rms(
    clip: AudioClip | None = None,
    S: np.ndarray | None = None,
    grid: FrameGrid | None = None,
    n_fft: int | None = None,
    sample_rate: int | None = None,
) -> FeatureMatrix:
    """Per-frame root-mean-square energy.

    Sample path: sqrt(mean of squared samples per frame). Spectrogram path
    (one-sided magnitudes, rectangular window): Parseval reconstruction
    sqrt((S0^2 + SK^2 + 2*sum(mid^2)) / n_fft^2).
    """
    if (clip is None) == (S is None):
        raise ValueError("pass exactly one of clip or S")
    if clip is not None:
        grid = grid or FrameGrid()
        frames, _ = frame_signal(clip.mono().astype(np.float64), grid)
        vals = np.sqrt((frames ** 2).mean(axis=1))
        times = frame_times(vals.size, grid, clip.sample_rate)
    else:
        if n_fft is None:
            raise ValueError("n_fft is required on the spectrogram path")
        S = np.asarray(S, dtype=np.float64)
        if S.shape[0] != n_fft // 2 + 1:
            raise DimensionMismatch(f"expected {n_fft // 2 + 1} bins, got {S.shape[0]}")
        sq = S ** 2
        total = 2.0 * sq[1:-1].sum(axis=0) + sq[0] + sq[-1]
        vals = np.sqrt(total) / n_fft
        if grid is not None and sample_rate:
            times = frame_times(vals.size, grid, sample_rate)
        else:
            times = np.arange(vals.size, dtype=np.float64)
    return FeatureMatrix(
        data=vals[None, :],
        row_axis="scalar",
        row_labels=np.zeros(1),
        frame_times=times,
    )


def _require_linear_magnitudes(spec: FeatureMatrix) -> np.ndarray:
    if spec.row_axis != "hz_linear":
        raise ValueError("spectral statistics need an hz_linear matrix")
    if np.any(spec.data < 0):
        raise NegativeMagnitude("statistics are defined on linear magnitudes, not dB")
    return spec.data


def spectral_centroid(spec: FeatureMatrix) -> FeatureMatrix:
    """Mean frequency of each frame's magnitude distribution; 0 for silence."""
    s = _require_linear_magnitudes(spec)
    freq = spec.row_labels[:, None]
    total = s.sum(axis=0)
    cent = np.where(total > 0, (s * freq).sum(axis=0) / np.where(total > 0, total, 1.0), 0.0)
    return FeatureMatrix(cent[None, :], "scalar", np.zeros(1), spec.frame_times)


def spectral_bandwidth(spec: FeatureMatrix, p: float = 2.0) -> FeatureMatrix:
    """p'th-order spread of each frame's spectrum around its centroid."""
    if p < 1:
        raise ValueError("order p must be >= 1")
    s = _require_linear_magnitudes(spec)
    total = s.sum(axis=0)
    norm = s / np.where(total > 0, total, 1.0)
    cent = spectral_centroid(spec).data[0]
    dev = np.abs(spec.row_labels[:, None] - cent[None, :]) ** p
    bw = (norm * dev).sum(axis=0) ** (1.0 / p)
    bw = np.where(total > 0, bw, 0.0)
    return FeatureMatrix(bw[None, :], "scalar", np.zeros(1), spec.frame_times)


def spectral_contrast(
    spec: FeatureMatrix,
    sample_rate: int,
    n_bands: int = 6,
    f_min_band: float = 200.0,
    alpha: float = 0.02,
) -> FeatureMatrix:
    """Peak-minus-valley contrast (dB) per octave sub-band.

    Band 0 is [0, f_min_band); band k is [f_min_band*2^(k-1), f_min_band*2^k).
    Peak/valley are means of the top/bottom ceil(alpha*B) bin magnitudes.
    """
    s = _require_linear_magnitudes(spec)
    nyquist = sample_rate / 2
    if f_min_band * 2.0 ** n_bands > nyquist:
        raise BandAboveNyquist(
            f"top band edge {f_min_band * 2 ** n_bands:.0f} Hz exceeds Nyquist {nyquist:.0f} Hz"
        )
    edges = [0.0] + [f_min_band * 2.0 ** k for k in range(n_bands + 1)]
    freqs = spec.row_labels
    rows = []
    for b in range(n_bands + 1):
        idx = np.nonzero((freqs >= edges[b]) & (freqs < edges[b + 1]))[0]
        if idx.size == 0:
            raise BadBandCount(f"sub-band {b} [{edges[b]}, {edges[b + 1]}) Hz contains no FFT bin")
        m = max(1, int(np.ceil(alpha * idx.size)))
        band = np.sort(s[idx], axis=0)
        valley = band[:m].mean(axis=0)
        peak = band[-m:].mean(axis=0)
        rows.append(
            10.0 * np.log10(np.maximum(peak, DB_AMIN))
            - 10.0 * np.log10(np.maximum(valley, DB_AMIN))
        )
    centers = [(edges[b] + edges[b + 1]) / 2 for b in range(n_bands + 1)]
    return FeatureMatrix(np.vstack(rows), "hz_linear", np.asarray(centers), spec.frame_times)
