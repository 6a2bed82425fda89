"""Short-time objective intelligibility.

Band-envelope correlation between a clean reference and a degraded estimate:

1. both signals resampled to 10 kHz;
2. frames more than 40 dB below the loudest reference frame are removed
   (256-sample Hann frames, 50% overlap, overlap-add reconstruction);
3. 512-point STFT (Hann 256, hop 128);
4. energies pooled into 15 one-third-octave bands, lowest center 150 Hz;
5. per band, sliding 30-frame segments of the degraded envelope are scaled to
   the clean segment norm and clipped at a -15 dB SDR bound;
6. the score is the mean correlation coefficient over all bands and segments.

Degenerate segments (zero variance, e.g. flat envelopes of a pure tone) count
as 1 when clean and degraded segments are identical and 0 otherwise, so
stoi(x, x) is exactly 1 for any admissible input.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..audio import AudioClip, as_mono_f64, resample
from ..errors import RateMismatch, TooShort

__all__ = ["StoiScore", "stoi"]

_FS = 10000
_FRAME = 256
_HOP = 128
_NFFT = 512
_N_BANDS = 15
_MIN_CENTER_HZ = 150.0
_SEGMENT_FRAMES = 30
_DYN_RANGE_DB = 40.0
_SDR_BOUND_DB = -15.0


@dataclass(frozen=True)
class StoiScore:
    value: float
    params: dict

    def to_json_dict(self) -> dict:
        return {"value": self.value, "params": dict(self.params)}


def _hanning(n: int) -> np.ndarray:
    # symmetric Hann without the zero endpoints (MATLAB hanning)
    return np.hanning(n + 2)[1:-1]


def _frames(x: np.ndarray, length: int, hop: int) -> np.ndarray:
    count = 1 + (x.size - length) // hop
    idx = np.arange(count)[:, None] * hop + np.arange(length)[None, :]
    return x[idx]


def _remove_silent_frames(x: np.ndarray, y: np.ndarray):
    w = _hanning(_FRAME)
    xf = _frames(x, _FRAME, _HOP) * w
    yf = _frames(y, _FRAME, _HOP) * w
    energy_db = 20.0 * np.log10(np.linalg.norm(xf, axis=1) + np.finfo(float).eps)
    keep = energy_db > energy_db.max() - _DYN_RANGE_DB
    xf, yf = xf[keep], yf[keep]
    if xf.shape[0] == 0:
        return np.zeros(0), np.zeros(0)
    n = (xf.shape[0] - 1) * _HOP + _FRAME
    xs = np.zeros(n)
    ys = np.zeros(n)
    for i in range(xf.shape[0]):
        xs[i * _HOP:i * _HOP + _FRAME] += xf[i]
        ys[i * _HOP:i * _HOP + _FRAME] += yf[i]
    return xs, ys


def _band_envelopes(x: np.ndarray, obm: np.ndarray) -> np.ndarray:
    frames = _frames(x, _FRAME, _HOP) * _hanning(_FRAME)
    spec = np.fft.rfft(frames, n=_NFFT, axis=1)
    power = np.abs(spec) ** 2
    return np.sqrt(obm @ power.T)  # (bands, frames)


def _third_octave_matrix() -> np.ndarray:
    freqs = np.arange(_NFFT // 2 + 1) * _FS / _NFFT
    k = np.arange(_N_BANDS)
    lo = _MIN_CENTER_HZ * 2.0 ** ((2 * k - 1) / 6.0)
    hi = _MIN_CENTER_HZ * 2.0 ** ((2 * k + 1) / 6.0)
    obm = np.zeros((_N_BANDS, freqs.size))
    for i in range(_N_BANDS):
        lo_bin = int(np.argmin(np.abs(freqs - lo[i])))
        hi_bin = int(np.argmin(np.abs(freqs - hi[i])))
        obm[i, lo_bin:hi_bin] = 1.0
    return obm


def _segment_correlation(xs: np.ndarray, ys: np.ndarray) -> float:
    """Mean correlation over bands of one 30-frame segment pair."""
    norms_x = np.linalg.norm(xs, axis=1, keepdims=True)
    norms_y = np.linalg.norm(ys, axis=1, keepdims=True)
    alpha = norms_x / np.where(norms_y > 0, norms_y, 1.0)
    y_scaled = ys * alpha
    clip_gain = 10.0 ** (-_SDR_BOUND_DB / 20.0)
    y_prime = np.minimum(y_scaled, xs * (1.0 + clip_gain))
    xc = xs - xs.mean(axis=1, keepdims=True)
    yc = y_prime - y_prime.mean(axis=1, keepdims=True)
    nx = np.linalg.norm(xc, axis=1)
    ny = np.linalg.norm(yc, axis=1)
    vals = np.zeros(xs.shape[0])
    for b in range(xs.shape[0]):
        if nx[b] == 0.0 and ny[b] == 0.0:
            vals[b] = 1.0 if np.allclose(xs[b], y_prime[b], atol=1e-12) else 0.0
        elif nx[b] == 0.0 or ny[b] == 0.0:
            vals[b] = 0.0
        else:
            vals[b] = float(xc[b] @ yc[b] / (nx[b] * ny[b]))
    return float(vals.mean())


def stoi(reference, estimate) -> StoiScore:
    """Intelligibility score, typically in [0, 1]; stoi(x, x) == 1."""
    ref_sr = getattr(reference, "sample_rate", _FS)
    est_sr = getattr(estimate, "sample_rate", _FS)
    one_clip = isinstance(reference, AudioClip) != isinstance(estimate, AudioClip)
    if one_clip and (ref_sr != _FS or est_sr != _FS):
        raise RateMismatch(
            "mixing a clip with a raw array: arrays are assumed to be at 10 kHz"
        )
    ref = as_mono_f64(reference)
    est = as_mono_f64(estimate)
    if ref.size / ref_sr < 0.5 or est.size / est_sr < 0.5:
        raise TooShort("stoi needs at least 0.5 s of audio on both sides")
    if ref_sr != _FS:
        ref = as_mono_f64(resample(AudioClip(ref.astype(np.float32), ref_sr), _FS))
    if est_sr != _FS:
        est = as_mono_f64(resample(AudioClip(est.astype(np.float32), est_sr), _FS))
    n = min(ref.size, est.size)
    ref, est = ref[:n], est[:n]
    ref, est = _remove_silent_frames(ref, est)
    if ref.size < _FRAME:
        raise TooShort("reference is entirely below the 40 dB speech range")

    obm = _third_octave_matrix()
    x_env = _band_envelopes(ref, obm)
    y_env = _band_envelopes(est, obm)
    n_frames = x_env.shape[1]
    if n_frames < _SEGMENT_FRAMES:
        raise TooShort(
            f"only {n_frames} analysis frames after silence removal; need {_SEGMENT_FRAMES}"
        )
    scores = [
        _segment_correlation(
            x_env[:, m - _SEGMENT_FRAMES:m], y_env[:, m - _SEGMENT_FRAMES:m]
        )
        for m in range(_SEGMENT_FRAMES, n_frames + 1)
    ]
    params = {
        "rate_hz": _FS,
        "frame": _FRAME,
        "hop": _HOP,
        "n_fft": _NFFT,
        "bands": _N_BANDS,
        "min_center_hz": _MIN_CENTER_HZ,
        "segment_frames": _SEGMENT_FRAMES,
        "dynamic_range_db": _DYN_RANGE_DB,
        "sdr_bound_db": _SDR_BOUND_DB,
    }
    return StoiScore(value=float(np.mean(scores)), params=params)
