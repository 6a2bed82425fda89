"""Edit-distance alignment and word/character error rates."""
from __future__ import annotations

import math
import re
import unicodedata
from dataclasses import dataclass

__all__ = ["Alignment", "TextNorm", "RateResult", "align", "wer", "cer"]


@dataclass(frozen=True)
class Alignment:
    """Minimal edit alignment between a reference and a hypothesis.

    ``edit_path`` lists ops as (op, ref_token, hyp_token) with op one of
    match/sub/del/ins; None stands for the absent side.
    """

    substitutions: int
    deletions: int
    insertions: int
    reference_length: int
    edit_path: tuple = ()

    @property
    def distance(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def error_rate(self) -> float:
        if self.reference_length == 0:
            return 0.0 if self.distance == 0 else math.inf
        return self.distance / self.reference_length

    @property
    def undefined(self) -> bool:
        """True when the rate is +inf (empty reference, nonempty hypothesis)."""
        return self.reference_length == 0 and self.distance > 0


def align(reference, hypothesis) -> Alignment:
    """Minimum-edit-distance alignment with unit costs.

    Among minimal alignments, substitutions are preferred over insert+delete
    pairs; remaining ties resolve toward the earliest substitution.
    """
    ref = list(reference)
    hyp = list(hypothesis)
    n, m = len(ref), len(hyp)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        dist[i][0] = i
    for j in range(m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            same = ref[i - 1] == hyp[j - 1]
            dist[i][j] = min(
                dist[i - 1][j - 1] + (0 if same else 1),
                dist[i - 1][j] + 1,
                dist[i][j - 1] + 1,
            )
    # Backtrace, preferring the diagonal so equal-cost scripts favor
    # substitutions; at equal cost the diagonal also places the substitution
    # as early as possible along the path.
    i, j = n, m
    path = []
    s = d = ins = 0
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            same = ref[i - 1] == hyp[j - 1]
            if dist[i][j] == dist[i - 1][j - 1] + (0 if same else 1):
                path.append(("match" if same else "sub", ref[i - 1], hyp[j - 1]))
                if not same:
                    s += 1
                i -= 1
                j -= 1
                continue
        if i > 0 and dist[i][j] == dist[i - 1][j] + 1:
            path.append(("del", ref[i - 1], None))
            d += 1
            i -= 1
        else:
            path.append(("ins", None, hyp[j - 1]))
            ins += 1
            j -= 1
    return Alignment(s, d, ins, n, tuple(reversed(path)))


@dataclass(frozen=True)
class TextNorm:
    """Normalization applied before alignment.

    Defaults: lowercase, strip Unicode punctuation, collapse whitespace.
    """

    lowercase: bool = True
    strip_punct: bool = True
    collapse_whitespace: bool = True

    def apply(self, text: str) -> str:
        if self.lowercase:
            text = text.lower()
        if self.strip_punct:
            text = "".join(
                " " if unicodedata.category(c).startswith("P") else c for c in text
            )
        if self.collapse_whitespace:
            text = re.sub(r"\s+", " ", text).strip()
        return text


@dataclass(frozen=True)
class RateResult:
    rate: float
    alignment: Alignment

    @property
    def undefined(self) -> bool:
        return self.alignment.undefined

    def to_json_dict(self) -> dict:
        a = self.alignment
        return {
            "rate": None if math.isinf(self.rate) else self.rate,
            "undefined_rate": self.undefined,
            "substitutions": a.substitutions,
            "deletions": a.deletions,
            "insertions": a.insertions,
            "reference_length": a.reference_length,
        }


def wer(reference: str, hypothesis: str, norm: TextNorm | None = None) -> RateResult:
    """Word error rate: whitespace tokens after normalization."""
    norm = norm or TextNorm()
    a = align(norm.apply(reference).split(), norm.apply(hypothesis).split())
    return RateResult(a.error_rate, a)


def cer(reference: str, hypothesis: str, norm: TextNorm | None = None) -> RateResult:
    """Character error rate: Unicode scalars after normalization, spaces kept."""
    norm = norm or TextNorm()
    a = align(list(norm.apply(reference)), list(norm.apply(hypothesis)))
    return RateResult(a.error_rate, a)
