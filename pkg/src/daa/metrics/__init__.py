"""Evaluation metrics: text error rates, signal fidelity, intelligibility."""

from .text import Alignment, RateResult, TextNorm, align, cer, wer
from .signal import BssScores, pit_assign, sdr_fir, si_snr, snr, DB_CAP
from .stoi import StoiScore, stoi
from .manifest import evaluate_manifest, report_to_csv

__all__ = [
    "Alignment",
    "RateResult",
    "TextNorm",
    "align",
    "wer",
    "cer",
    "BssScores",
    "snr",
    "si_snr",
    "sdr_fir",
    "pit_assign",
    "DB_CAP",
    "StoiScore",
    "stoi",
    "evaluate_manifest",
    "report_to_csv",
]
