"""Named feature catalog: the 13 analysis views, dispatchable by string name.

This is the surface the CLI (``daa features``), the REST service
(``/features``) and FEAT pipeline steps share. Each entry carries a parameter
schema so clients can build forms without hardcoding.
"""
from __future__ import annotations

import numpy as np

from .audio import AudioClip, FrameGrid, frame_times, to_mono
from .errors import UnknownFeature
from .features import (
    FeatureMatrix,
    FftParams,
    MelParams,
    chroma_cens,
    chroma_cqt,
    chroma_stft,
    dct_matrix,
    log_frequency_spectrogram,
    magnitude_spectrogram,
    mel_spectrogram,
    mfcc,
    power_spectrogram,
    rms,
    spectral_bandwidth,
    spectral_centroid,
    spectral_contrast,
)
from .features import C1_HZ

_STFT_PARAMS = {
    "n_fft": {"type": "int", "default": 2048},
    "frame_length": {"type": "int", "default": None},  # None -> n_fft
    "hop_length": {"type": "int", "default": 512},
    "window": {"type": "str", "default": "hann", "choices": ["hann", "hamming", "rectangular"]},
    "center": {"type": "bool", "default": True},
}

_CQT_PARAMS = {
    "f_min": {"type": "float", "default": C1_HZ},
    "bins_per_octave": {"type": "int", "default": 12},
    "n_bins": {"type": "int", "default": 72},
    "hop_length": {"type": "int", "default": 512},
}

FEATURES: dict[str, dict] = {
    "linear_power_spectrogram": {**_STFT_PARAMS, "power": {"type": "int", "default": 2}},
    "log_frequency_spectrogram": {**_STFT_PARAMS, "power": {"type": "int", "default": 2}},
    "chroma_stft": {**_STFT_PARAMS, "power": {"type": "int", "default": 2}},
    "chroma_cqt": dict(_CQT_PARAMS),
    "chroma_cens": {**_CQT_PARAMS, "smooth_window": {"type": "int", "default": 41}},
    "mel_spectrogram": {
        **_STFT_PARAMS,
        "power": {"type": "int", "default": 2},
        "n_mels": {"type": "int", "default": 40},
    },
    "mel_frequency_spectrogram": {
        **_STFT_PARAMS,
        "power": {"type": "int", "default": 2},
        "n_mels": {"type": "int", "default": 40},
        "f_min": {"type": "float", "default": 0.0},
        "f_max": {"type": "float", "default": None},
        "norm": {"type": "str", "default": "slaney_area", "choices": ["slaney_area", "none"]},
    },
    "mfcc": {
        **_STFT_PARAMS,
        "n_mels": {"type": "int", "default": 40},
        "n_mfcc": {"type": "int", "default": 20},
        "dct_kind": {"type": "int", "default": 2, "choices": [1, 2, 3, 4]},
    },
    "dct_bases": {
        "dct_kind": {"type": "int", "default": 2, "choices": [1, 2, 3, 4]},
        "n": {"type": "int", "default": 32},
        "ortho": {"type": "bool", "default": True},
    },
    "rms": {
        "frame_length": {"type": "int", "default": 2048},
        "hop_length": {"type": "int", "default": 512},
        "center": {"type": "bool", "default": True},
    },
    "spectral_centroid": dict(_STFT_PARAMS),
    "spectral_bandwidth": {**_STFT_PARAMS, "p": {"type": "float", "default": 2.0}},
    "spectral_contrast": {
        **_STFT_PARAMS,
        "n_bands": {"type": "int", "default": 6},
        "f_min_band": {"type": "float", "default": 200.0},
        "alpha": {"type": "float", "default": 0.02},
    },
}


def feature_names() -> list[str]:
    return list(FEATURES)


def feature_schema(name: str) -> dict:
    if name not in FEATURES:
        raise UnknownFeature(f"unknown feature {name!r}; known: {', '.join(FEATURES)}")
    return FEATURES[name]


def _coerce(schema: dict, params: dict) -> dict:
    out = {}
    for key, value in params.items():
        if key not in schema:
            raise UnknownFeature(f"unknown parameter {key!r}; accepted: {', '.join(schema)}")
        kind = schema[key]["type"]
        if value is None:
            out[key] = None
        elif kind == "int":
            out[key] = int(value)
        elif kind == "float":
            out[key] = float(value)
        elif kind == "bool":
            out[key] = value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes")
        else:
            out[key] = str(value)
    for key, meta in schema.items():
        out.setdefault(key, meta["default"])
    return out


def _grid(p: dict) -> FrameGrid:
    frame = p.get("frame_length") or p.get("n_fft", 2048)
    return FrameGrid(
        frame_length=frame,
        hop_length=p.get("hop_length", 512),
        window=p.get("window", "hann"),
        center=p.get("center", True),
    )


def _fft(p: dict) -> FftParams:
    return FftParams(n_fft=p.get("n_fft", 2048), grid=_grid(p), power=p.get("power", 2))


def compute_feature(clip: AudioClip, name: str, params: dict | None = None) -> FeatureMatrix:
    """Run a catalog feature by name on a clip (mixed down to mono first)."""
    p = _coerce(feature_schema(name), params or {})
    clip = to_mono(clip)
    if name == "linear_power_spectrogram":
        return power_spectrogram(clip, _fft(p))
    if name == "log_frequency_spectrogram":
        return log_frequency_spectrogram(clip, _fft(p))
    if name == "chroma_stft":
        return chroma_stft(clip, _fft(p))
    if name == "chroma_cqt":
        return chroma_cqt(clip, _grid({"frame_length": 2048, "hop_length": p["hop_length"]}),
                          p["f_min"], p["bins_per_octave"], p["n_bins"])
    if name == "chroma_cens":
        return chroma_cens(clip, _grid({"frame_length": 2048, "hop_length": p["hop_length"]}),
                           p["f_min"], p["bins_per_octave"], p["n_bins"], p["smooth_window"])
    if name in ("mel_spectrogram", "mel_frequency_spectrogram"):
        mel = MelParams(
            n_mels=p["n_mels"],
            f_min=p.get("f_min", 0.0),
            f_max=p.get("f_max"),
            norm=p.get("norm", "slaney_area"),
        )
        return mel_spectrogram(clip, _fft(p), mel)
    if name == "mfcc":
        return mfcc(clip, _fft(p), MelParams(n_mels=p["n_mels"]), p["n_mfcc"], p["dct_kind"])
    if name == "dct_bases":
        mat = dct_matrix(p["dct_kind"], p["n"], p["ortho"])
        idx = np.arange(p["n"], dtype=np.float64)
        return FeatureMatrix(mat, "cepstral", idx, idx)
    if name == "rms":
        return rms(clip=clip, grid=_grid({**p, "frame_length": p["frame_length"]}))
    spec_params = _fft({**p, "power": 1})
    spec = power_spectrogram_linear(clip, spec_params)
    if name == "spectral_centroid":
        return spectral_centroid(spec)
    if name == "spectral_bandwidth":
        return spectral_bandwidth(spec, p["p"])
    if name == "spectral_contrast":
        return spectral_contrast(spec, clip.sample_rate, p["n_bands"], p["f_min_band"], p["alpha"])
    raise UnknownFeature(name)


def power_spectrogram_linear(clip: AudioClip, params: FftParams) -> FeatureMatrix:
    """Linear-magnitude spectrogram (no dB), for the distribution statistics."""
    s = magnitude_spectrogram(clip, params)
    return FeatureMatrix(
        data=s,
        row_axis="hz_linear",
        row_labels=params.bin_frequencies(clip.sample_rate),
        frame_times=frame_times(s.shape[1], params.grid, clip.sample_rate),
    )
