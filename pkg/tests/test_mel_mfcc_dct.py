import numpy as np
import pytest
import scipy.fft

from daa.audio import FrameGrid
from daa.errors import BadBandCount, DimensionMismatch, SizeTooSmall
from daa.features import (
    FftParams,
    MelParams,
    dct_matrix,
    hz_to_mel,
    magnitude_spectrogram,
    mel_filterbank,
    mel_frequencies,
    mel_spectrogram,
    mel_to_hz,
    mfcc,
    triangle_weights,
)

from conftest import silence, tone


class TestMelScale:
    def test_break_point(self):
        assert hz_to_mel(1000.0) == pytest.approx(15.0)
        assert mel_to_hz(15.0) == pytest.approx(1000.0)

    def test_linear_below_break(self):
        assert hz_to_mel(500.0) == pytest.approx(7.5)

    def test_log_spacing_above_break(self):
        # 27 bands span 1 kHz to 6.4 kHz on the log segment
        assert hz_to_mel(6400.0) == pytest.approx(42.0)

    def test_roundtrip(self):
        f = np.linspace(10, 7900, 50)
        assert mel_to_hz(hz_to_mel(f)) == pytest.approx(f)


class TestMelFilterbank:
    def test_shape(self):
        fb = mel_filterbank(16000, 512, MelParams(n_mels=40))
        assert fb.shape == (40, 257)

    def test_all_weights_nonnegative(self):
        fb = mel_filterbank(16000, 512, MelParams(n_mels=40))
        assert np.all(fb >= 0)

    def test_coverage(self):
        params = MelParams(n_mels=40, f_min=0.0)
        fb = mel_filterbank(16000, 512, params)
        freqs = np.arange(257) * 16000 / 512
        inside = (freqs > 0.0) & (freqs < 8000.0)
        assert np.all(fb[:, inside].sum(axis=0) > 0)

    def test_unit_apex_unnormalized(self):
        # triangles peak at exactly 1 at their center frequency
        edges = mel_frequencies(7, 0.0, 8000.0)
        for m in range(5):
            assert triangle_weights(
                np.array([edges[m + 1]]), edges[m], edges[m + 1], edges[m + 2]
            )[0] == pytest.approx(1.0)
        fb = mel_filterbank(16000, 2048, MelParams(n_mels=5, norm="none"))
        assert np.all(fb.max(axis=1) <= 1.0 + 1e-12)
        assert np.all(fb.max(axis=1) > 0.9)

    def test_slaney_area_norm(self):
        params = MelParams(n_mels=10)
        fb = mel_filterbank(16000, 1024, params)
        edges = mel_frequencies(12, 0.0, 8000.0)
        raw = mel_filterbank(16000, 1024, MelParams(n_mels=10, norm="none"))
        for m in range(10):
            assert fb[m] == pytest.approx(raw[m] * 2.0 / (edges[m + 2] - edges[m]))

    def test_collapsed_band_detected(self):
        with pytest.raises(BadBandCount):
            mel_filterbank(16000, 256, MelParams(n_mels=200))


class TestMelSpectrogram:
    def test_clip_and_precomputed_agree(self):
        clip = tone()
        fft = FftParams()
        mel = MelParams(n_mels=40)
        from_clip = mel_spectrogram(clip, fft, mel)
        S = magnitude_spectrogram(clip, fft)
        from_s = mel_spectrogram(None, fft, mel, S=S, sample_rate=clip.sample_rate)
        assert np.array_equal(from_clip.data, from_s.data)

    def test_silence_zero_before_db(self):
        m = mel_spectrogram(silence(0.2), FftParams(), MelParams(n_mels=40), to_db=False)
        assert np.all(m.data == 0.0)

    def test_1khz_argmax_band(self):
        clip = tone(freq=1000, sample_rate=16000)
        mel = MelParams(n_mels=40)
        m = mel_spectrogram(clip, FftParams(), mel)
        # oracle: band centers are the interior mel breakpoints
        centers = mel_frequencies(42, 0.0, 8000.0)[1:-1]
        expected = int(np.argmin(np.abs(centers - 1000.0)))
        assert np.argmax(m.data[:, m.frames // 2]) == expected

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            mel_spectrogram(
                None, FftParams(n_fft=512, grid=FrameGrid(512, 128)), MelParams(n_mels=10),
                S=np.zeros((100, 4)), sample_rate=16000,
            )


class TestDctMatrix:
    @pytest.mark.parametrize("kind", [1, 2, 3, 4])
    def test_matches_scipy(self, kind):
        n = 16
        ours = dct_matrix(kind, n, ortho=False)
        eye = np.eye(n)
        theirs = scipy.fft.dct(eye, type=kind, axis=0, norm=None)
        assert ours @ eye == pytest.approx(theirs, abs=1e-10)

    @pytest.mark.parametrize("kind", [1, 2, 3, 4])
    def test_ortho_matches_scipy(self, kind):
        n = 12
        ours = dct_matrix(kind, n, ortho=True)
        theirs = scipy.fft.dct(np.eye(n), type=kind, axis=0, norm="ortho")
        assert ours == pytest.approx(theirs, abs=1e-10)

    def test_dct2_orthonormal(self):
        m = dct_matrix(2, 32, ortho=True)
        assert m @ m.T == pytest.approx(np.eye(32), abs=1e-10)

    def test_dct3_is_transpose_of_dct2(self):
        assert np.array_equal(dct_matrix(3, 20, ortho=True), dct_matrix(2, 20, ortho=True).T)

    def test_dct2_constant_vector(self):
        m = dct_matrix(2, 16, ortho=True)
        coeffs = m @ np.full(16, 3.0)
        assert coeffs[0] == pytest.approx(3.0 * np.sqrt(16))
        assert np.max(np.abs(coeffs[1:])) < 1e-12

    def test_dct4_involution(self):
        m = dct_matrix(4, 24, ortho=True)
        assert m @ m == pytest.approx(np.eye(24), abs=1e-10)

    def test_size_too_small(self):
        with pytest.raises(SizeTooSmall):
            dct_matrix(2, 1)
        with pytest.raises(SizeTooSmall):
            dct_matrix(1, 2)


class TestMfcc:
    def test_silence_coefficients(self):
        m = mfcc(silence(0.3), FftParams(), MelParams(n_mels=40), n_mfcc=13)
        # every frame identical; c0 = sqrt(n_mels) * floor_dB, others 0
        floor_db = 10.0 * np.log10(1e-10)
        assert np.all(m.data[0] == pytest.approx(np.sqrt(40) * floor_db))
        assert np.max(np.abs(m.data[1:])) < 1e-9
        assert m.data == pytest.approx(np.tile(m.data[:, :1], (1, m.frames)), abs=1e-9)

    def test_shape(self):
        m = mfcc(tone(), FftParams(), MelParams(n_mels=40), n_mfcc=20)
        assert m.rows == 20
        assert m.row_axis == "cepstral"

    def test_hop_shift_moves_columns(self):
        import daa.audio as audio
        import numpy as np

        sr = 16000
        hop = 512
        rng = np.random.default_rng(4)
        base = rng.uniform(-0.8, 0.8, sr).astype(np.float32)
        a = audio.AudioClip(base[None, :], sr)
        b = audio.AudioClip(base[hop:][None, :], sr)  # advance by one hop
        p = FftParams(n_fft=2048, grid=FrameGrid(2048, hop))
        ma = mfcc(a, p, MelParams(n_mels=40))
        mb = mfcc(b, p, MelParams(n_mels=40))
        # compare interior columns, away from the reflect-padded edges
        assert ma.data[:, 6:20] == pytest.approx(mb.data[:, 5:19], abs=1e-6)

    def test_n_mfcc_bound(self):
        with pytest.raises(ValueError):
            mfcc(tone(), FftParams(), MelParams(n_mels=10), n_mfcc=11)

    def test_alternate_dct_kind(self):
        m2 = mfcc(tone(), FftParams(), MelParams(n_mels=40), dct_kind=2)
        m4 = mfcc(tone(), FftParams(), MelParams(n_mels=40), dct_kind=4)
        assert not np.allclose(m2.data, m4.data)
