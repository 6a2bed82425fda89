#!/usr/bin/env python3
"""Feature visualization walkthrough.

Synthesizes a small test scene (two tones over a noise floor), runs a few of
the catalog features, and writes heatmap PNGs plus the matrix JSON next to
this script. Every feature shown here is also reachable via
`daa features <wav> --feature <name>` and POST /api/v1/audio/{id}/features/{name}.
"""
from pathlib import Path

import numpy as np

from daa.audio import AudioClip, synth
from daa.featureset import compute_feature, feature_names
from daa.heatmap import render_heatmap

OUT = Path(__file__).parent / "out" / "features"
OUT.mkdir(parents=True, exist_ok=True)

# a scene: A4 for a second, then a fifth up, over a quiet noise floor
sr = 16000
a4 = synth("sine", freq=440, amplitude=0.5, duration_s=1.0, sample_rate=sr)
e5 = synth("sine", freq=659.26, amplitude=0.5, duration_s=1.0, sample_rate=sr)
floor = synth("white_noise", amplitude=0.01, duration_s=2.0, sample_rate=sr, seed=1)
scene = AudioClip(
    (np.concatenate([a4.mono(), e5.mono()]) + floor.mono())[None, :], sr
)

print(f"catalog has {len(feature_names())} features: {', '.join(feature_names())}")

for name, params in [
    ("linear_power_spectrogram", {}),
    ("log_frequency_spectrogram", {}),
    ("mel_spectrogram", {"n_mels": 64}),
    ("mfcc", {"n_mfcc": 20}),
    ("chroma_stft", {}),
    ("chroma_cens", {}),
    ("spectral_centroid", {}),
]:
    matrix = compute_feature(scene, name, params)
    png = OUT / f"{name}.png"
    png.write_bytes(render_heatmap(matrix))
    print(f"{name:28} {matrix.rows:4} x {matrix.frames:3}  ({matrix.row_axis:9}) -> {png.name}")

# the chroma view should flip from pitch class A (9) to E (4) halfway through
chroma = compute_feature(scene, "chroma_stft", {})
first, second = chroma.frames // 4, 3 * chroma.frames // 4
print("dominant pitch class, first half: ", int(np.argmax(chroma.data[:, first])))
print("dominant pitch class, second half:", int(np.argmax(chroma.data[:, second])))
