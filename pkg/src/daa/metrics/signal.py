"""Signal-fidelity ratios: SNR, scale-invariant SNR/SDR, FIR-projected SDR,
and permutation-invariant scoring for separated sources.

All functions accept AudioClips or plain 1-D arrays and compute in float64.
Infinite ratios are reported as a +/-300 dB cap so results stay
JSON-serializable; the cap is part of the wire contract.

SI-SNR and SI-SDR differ only in mean removal here: SI-SDR subtracts the
means of both signals first, SI-SNR does not.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np
from scipy.linalg import cho_factor, cho_solve, toeplitz
from scipy.signal import fftconvolve

from ..audio import as_mono_f64
from ..errors import CountMismatch, LengthMismatch, RateMismatch, SingularProjection, ZeroReference

__all__ = ["DB_CAP", "BssScores", "snr", "si_snr", "sdr_fir", "pit_assign"]

DB_CAP = 300.0
_RIDGE = 1e-10


def _pair(reference, estimate, trim_to_shorter: bool = False):
    ref = as_mono_f64(reference)
    est = as_mono_f64(estimate)
    sr_ref = getattr(reference, "sample_rate", None)
    sr_est = getattr(estimate, "sample_rate", None)
    if sr_ref is not None and sr_est is not None and sr_ref != sr_est:
        raise RateMismatch(f"sample rates differ: {sr_ref} vs {sr_est}")
    if ref.size != est.size:
        if not trim_to_shorter:
            raise LengthMismatch(f"lengths differ: {ref.size} vs {est.size}")
        n = min(ref.size, est.size)
        ref, est = ref[:n], est[:n]
    return ref, est


def _ratio_db(num: float, den: float) -> float:
    if den <= 0.0:
        return DB_CAP
    if num <= 0.0:
        return -DB_CAP
    return float(np.clip(10.0 * np.log10(num / den), -DB_CAP, DB_CAP))


def snr(reference, estimate, trim_to_shorter: bool = False) -> float:
    """10*log10(signal energy / error energy), capped at +/-300 dB."""
    ref, est = _pair(reference, estimate, trim_to_shorter)
    return _ratio_db(float(ref @ ref), float((ref - est) @ (ref - est)))


def si_snr(reference, estimate, zero_mean: bool = False, trim_to_shorter: bool = False) -> float:
    """Scale-invariant SNR: project the estimate on the reference line.

    zero_mean=True subtracts both means first; that variant is SI-SDR.
    """
    ref, est = _pair(reference, estimate, trim_to_shorter)
    if zero_mean:
        ref = ref - ref.mean()
        est = est - est.mean()
    ref_energy = float(ref @ ref)
    if ref_energy == 0.0:
        raise ZeroReference("reference signal is all zeros")
    target = (float(est @ ref) / ref_energy) * ref
    err = est - target
    return _ratio_db(float(target @ target), float(err @ err))


def si_sdr(reference, estimate, trim_to_shorter: bool = False) -> float:
    return si_snr(reference, estimate, zero_mean=True, trim_to_shorter=trim_to_shorter)


def sdr_fir(reference, estimate, taps: int = 512, trim_to_shorter: bool = False) -> float:
    """SDR with the target defined as the least-squares projection of the
    estimate onto the reference delayed by 0..taps-1 samples.

    Normal equations use the reference autocorrelation Toeplitz matrix with a
    1e-10 ridge; signals are zero-padded by taps-1 so the Gram matrix is
    exactly Toeplitz.
    """
    ref, est = _pair(reference, estimate, trim_to_shorter)
    n = ref.size
    if not 1 <= taps <= max(1, n // 4):
        raise ValueError(f"taps must be in [1, len/4], got {taps} for length {n}")
    if not np.any(ref):
        raise SingularProjection("reference signal is all zeros")
    # autocorrelation r[k] = sum_n ref[n] ref[n+k], k = 0..taps-1
    acorr = fftconvolve(ref, ref[::-1])[n - 1:n - 1 + taps]
    # cross-correlation b[l] = sum_n est[n] ref[n-l]
    xcorr = fftconvolve(est, ref[::-1])[n - 1:n - 1 + taps]
    r = acorr.copy()
    r[0] += _RIDGE * max(1.0, acorr[0])
    coef = cho_solve(cho_factor(toeplitz(r)), xcorr)
    target = fftconvolve(ref, coef)  # length n + taps - 1, the padded domain
    est_padded = np.concatenate([est, np.zeros(taps - 1)])
    err = est_padded - target
    return _ratio_db(float(target @ target), float(err @ err))


@dataclass(frozen=True)
class BssScores:
    """Per-source and mean separation scores under the best permutation.

    ``permutation[i]`` is the estimate index assigned to reference i.
    """

    permutation: tuple
    snr: tuple
    sdr: tuple
    si_snr: tuple
    si_sdr: tuple
    mean_snr: float
    mean_sdr: float
    mean_si_snr: float
    mean_si_sdr: float

    def to_json_dict(self) -> dict:
        return {
            "permutation": list(self.permutation),
            "per_source": [
                {"snr": self.snr[i], "sdr": self.sdr[i],
                 "si_snr": self.si_snr[i], "si_sdr": self.si_sdr[i]}
                for i in range(len(self.permutation))
            ],
            "mean": {"snr": self.mean_snr, "sdr": self.mean_sdr,
                     "si_snr": self.mean_si_snr, "si_sdr": self.mean_si_sdr},
        }


def pit_assign(references, estimates, taps: int = 512) -> BssScores:
    """Permutation-invariant scoring: pick the source assignment maximizing
    mean SI-SDR, then report all four measures under it.
    """
    if len(references) != len(estimates):
        raise CountMismatch(f"{len(references)} references vs {len(estimates)} estimates")
    n = len(references)
    if not 1 <= n <= 4:
        raise CountMismatch(f"source count must be 1..4, got {n}")
    refs = [as_mono_f64(r) for r in references]
    ests = [as_mono_f64(e) for e in estimates]
    cache = {}

    def pair_si_sdr(i, j):
        if (i, j) not in cache:
            cache[(i, j)] = si_snr(refs[i], ests[j], zero_mean=True)
        return cache[(i, j)]

    best_perm = None
    best_mean = -np.inf
    for perm in permutations(range(n)):
        mean = sum(pair_si_sdr(i, perm[i]) for i in range(n)) / n
        if mean > best_mean:
            best_mean = mean
            best_perm = perm
    per_snr = tuple(snr(refs[i], ests[best_perm[i]]) for i in range(n))
    per_sdr = tuple(sdr_fir(refs[i], ests[best_perm[i]], taps=min(taps, max(1, refs[i].size // 4))) for i in range(n))
    per_si_snr = tuple(si_snr(refs[i], ests[best_perm[i]]) for i in range(n))
    per_si_sdr = tuple(pair_si_sdr(i, best_perm[i]) for i in range(n))
    return BssScores(
        permutation=best_perm,
        snr=per_snr,
        sdr=per_sdr,
        si_snr=per_si_snr,
        si_sdr=per_si_sdr,
        mean_snr=float(np.mean(per_snr)),
        mean_sdr=float(np.mean(per_sdr)),
        mean_si_snr=float(np.mean(per_si_snr)),
        mean_si_sdr=float(np.mean(per_si_sdr)),
    )
