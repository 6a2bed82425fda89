"""Batch evaluation over a CSV manifest.

Manifest format (UTF-8, header required): columns ``id``, ``reference``,
``hypothesis``. For text metrics a cell may hold literal text or a path to a
text file; for signal metrics both cells must point to WAV files. An optional
``pesq`` column is passed through per row and averaged (PESQ itself is not
computed here).

Output: a deterministic report dict {rows, aggregates, config} plus a CSV
mirror of the rows. Per-row failures (missing files) are reported in the row
and evaluation continues.
"""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path

from ..audio import load_wav
from ..errors import DaaError, ManifestParse
from .signal import sdr_fir, si_snr, snr
from .stoi import stoi
from .text import TextNorm, cer, wer

__all__ = ["evaluate_manifest", "report_to_csv", "TEXT_METRICS", "SIGNAL_METRICS"]

TEXT_METRICS = ("wer", "cer")
SIGNAL_METRICS = ("snr", "sdr", "si_snr", "si_sdr", "stoi")


def _read_manifest(path) -> list[dict]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestParse(f"cannot read manifest {path}: {exc}") from exc
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise ManifestParse("manifest has no header row")
    required = {"id", "reference", "hypothesis"}
    missing = required - set(reader.fieldnames)
    if missing:
        raise ManifestParse(f"manifest missing columns: {', '.join(sorted(missing))}")
    rows = list(reader)
    for i, row in enumerate(rows):
        if row.get("id") is None or row.get("reference") is None or row.get("hypothesis") is None:
            raise ManifestParse(f"row {i + 1} is incomplete")
    return rows


def _resolve_text(cell: str, base: Path) -> str:
    candidate = (base / cell).expanduser()
    if candidate.is_file():
        return candidate.read_text(encoding="utf-8")
    direct = Path(cell).expanduser()
    if direct.is_file():
        return direct.read_text(encoding="utf-8")
    return cell


def _resolve_wav(cell: str, base: Path):
    for candidate in ((base / cell), Path(cell)):
        if candidate.is_file():
            return load_wav(candidate)
    raise DaaError(f"audio file not found: {cell}")


def evaluate_manifest(path, metrics, norm: TextNorm | None = None, taps: int = 512) -> dict:
    """Evaluate every manifest row with the requested metric set.

    WER/CER aggregate by pooling errors over total reference tokens; signal
    metrics aggregate by arithmetic mean over successful rows.
    """
    metrics = list(metrics)
    unknown = [m for m in metrics if m not in TEXT_METRICS + SIGNAL_METRICS]
    if unknown:
        raise ManifestParse(f"unknown metrics: {', '.join(unknown)}")
    norm = norm or TextNorm()
    base = Path(path).parent
    entries = _read_manifest(path)

    rows = []
    pooled = {m: {"errors": 0, "length": 0} for m in TEXT_METRICS if m in metrics}
    sums: dict[str, list[float]] = {m: [] for m in metrics if m in SIGNAL_METRICS}
    pesq_vals: list[float] = []
    failed = 0
    for entry in entries:
        row: dict = {"id": entry["id"], "metrics": {}}
        try:
            values = _evaluate_row(entry, metrics, norm, base, taps)
            row["metrics"] = values
            for m in pooled:
                a = values[m + "_counts"]
                pooled[m]["errors"] += a["errors"]
                pooled[m]["length"] += a["length"]
            for m in sums:
                sums[m].append(values[m])
            if entry.get("pesq") not in (None, ""):
                row["metrics"]["pesq"] = float(entry["pesq"])
                pesq_vals.append(float(entry["pesq"]))
        except DaaError as exc:
            row["error"] = str(exc)
            failed += 1
        rows.append(row)

    aggregates: dict = {}
    for m, acc in pooled.items():
        aggregates[m] = (acc["errors"] / acc["length"]) if acc["length"] else None
    for m, vals in sums.items():
        aggregates[m] = (sum(vals) / len(vals)) if vals else None
    if pesq_vals:
        aggregates["pesq"] = sum(pesq_vals) / len(pesq_vals)
    return {
        "rows": rows,
        "aggregates": aggregates,
        "config": {
            "metrics": metrics,
            "normalization": {
                "lowercase": norm.lowercase,
                "strip_punct": norm.strip_punct,
                "collapse_whitespace": norm.collapse_whitespace,
            },
            "sdr_taps": taps,
        },
        "counts": {"rows": len(rows), "failed": failed},
    }


def _evaluate_row(entry, metrics, norm, base, taps) -> dict:
    values: dict = {}
    if any(m in TEXT_METRICS for m in metrics):
        ref_text = _resolve_text(entry["reference"], base)
        hyp_text = _resolve_text(entry["hypothesis"], base)
        for name, fn in (("wer", wer), ("cer", cer)):
            if name in metrics:
                res = fn(ref_text, hyp_text, norm)
                values[name] = None if math.isinf(res.rate) else res.rate
                values[name + "_counts"] = {
                    "errors": res.alignment.distance,
                    "length": res.alignment.reference_length,
                }
    if any(m in SIGNAL_METRICS for m in metrics):
        ref_clip = _resolve_wav(entry["reference"], base)
        hyp_clip = _resolve_wav(entry["hypothesis"], base)
        if "snr" in metrics:
            values["snr"] = snr(ref_clip, hyp_clip)
        if "sdr" in metrics:
            values["sdr"] = sdr_fir(ref_clip, hyp_clip,
                                    taps=min(taps, max(1, ref_clip.frame_count // 4)))
        if "si_snr" in metrics:
            values["si_snr"] = si_snr(ref_clip, hyp_clip, zero_mean=False)
        if "si_sdr" in metrics:
            values["si_sdr"] = si_snr(ref_clip, hyp_clip, zero_mean=True)
        if "stoi" in metrics:
            values["stoi"] = stoi(ref_clip, hyp_clip).value
    return values


def report_to_csv(report: dict) -> str:
    """CSV mirror of the per-row results, stable column order."""
    metric_cols: list[str] = []
    for row in report["rows"]:
        for key in row.get("metrics", {}):
            if not key.endswith("_counts") and key not in metric_cols:
                metric_cols.append(key)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", *metric_cols, "error"])
    for row in report["rows"]:
        vals = [row["metrics"].get(c, "") for c in metric_cols]
        vals = ["" if v is None else v for v in vals]
        writer.writerow([row["id"], *vals, row.get("error", "")])
    return buf.getvalue()
