"""Command line interface.

Exit status contract: 0 success, 1 validation/domain error, 2 usage error,
3 partial failure (manifest rows or pipeline steps failed). With --json the
machine-readable result goes to stdout; human messages go to stderr.

Local `pipeline run` embeds the engine directly — no server needed — and
produces reports identical (after timestamp erasure) to service runs.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .audio import load_wav
from .errors import DaaError, ValidationFailed
from .featureset import compute_feature, feature_names
from .heatmap import render_heatmap
from .metrics.manifest import SIGNAL_METRICS, TEXT_METRICS, evaluate_manifest, report_to_csv
from .metrics.signal import pit_assign
from .metrics.stoi import stoi
from .metrics.text import TextNorm, cer, wer
from .pipeline import (
    PipelineSpec,
    RunReport,
    execute,
    export_pipeline,
    import_pipeline,
    render_report,
    set_rating,
    validate,
)
from .processors.registry import registry_load, seed_catalog_path
from .processors.types import TaskKind

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_PARTIAL = 3


class _Fail(click.ClickException):
    exit_code = EXIT_DOMAIN

    def __init__(self, message, code=EXIT_DOMAIN):
        super().__init__(message)
        self.exit_code = code


def _parse_params(pairs) -> dict:
    params = {}
    for pair in pairs:
        if "=" not in pair:
            raise click.UsageError(f"--param expects k=v, got {pair!r}")
        key, value = pair.split("=", 1)
        params[key] = value
    return params


def _emit(ctx_json: bool, payload: dict, human: str):
    if ctx_json:
        click.echo(json.dumps(payload, sort_keys=True))
    else:
        click.echo(human)


def _text_arg(value: str) -> str:
    if value == "-":
        return sys.stdin.read()
    path = Path(value)
    if path.is_file():
        return path.read_text(encoding="utf-8")
    return value


@click.group()
def main():
    """Forensic audio workbench: features, pipelines, metrics, service."""


# --- features ---

@main.command("features")
@click.argument("wav", type=click.Path(exists=True, dir_okay=False))
@click.option("--feature", "feature_name", required=True)
@click.option("--param", "params", multiple=True, help="k=v, repeatable")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="write matrix JSON here")
@click.option("--png", "png_path", type=click.Path(dir_okay=False), help="write heatmap PNG here")
@click.option("--json", "as_json", is_flag=True, help="print matrix JSON to stdout")
def features_cmd(wav, feature_name, params, out_path, png_path, as_json):
    """Extract one named feature from a WAV file."""
    if feature_name not in feature_names():
        raise click.UsageError(
            f"unknown feature {feature_name!r}; known: {', '.join(feature_names())}"
        )
    try:
        clip = load_wav(wav)
        matrix = compute_feature(clip, feature_name, _parse_params(params))
    except DaaError as exc:
        raise _Fail(str(exc))
    doc = matrix.to_json_dict()
    if out_path:
        Path(out_path).write_text(json.dumps(doc, sort_keys=True, indent=2), encoding="utf-8")
    if png_path:
        Path(png_path).write_bytes(render_heatmap(matrix))
    if as_json:
        click.echo(json.dumps(doc, sort_keys=True))
    elif not out_path and not png_path:
        click.echo(
            f"{feature_name}: {matrix.rows} rows x {matrix.frames} frames ({matrix.row_axis})"
        )


# --- pipelines ---

@main.group("pipeline")
def pipeline_group():
    """Create, edit, validate and run pipelines (.dap.json files)."""


@pipeline_group.command("new")
@click.argument("name")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="default <name>.dap.json")
def pipeline_new(name, out_path):
    """Write an empty pipeline file."""
    spec = PipelineSpec(name=name)
    target = Path(out_path) if out_path else Path(f"{name}.dap.json")
    target.write_bytes(export_pipeline(spec))
    click.echo(str(target))


@pipeline_group.command("add-step")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--task", required=True)
@click.option("--model", "processor_id", required=True)
@click.option("--input", "inputs", multiple=True, required=True,
              help="source:<i> or step:<id>:<slot>, repeatable")
@click.option("--param", "params", multiple=True)
@click.option("--id", "step_id", default=None, help="step id (default s<N>)")
def pipeline_add_step(file, task, processor_id, inputs, params, step_id):
    """Append one step to a pipeline file."""
    from .pipeline.spec import InputBinding, StepSpec

    try:
        spec = import_pipeline(Path(file).read_bytes())
        kind = TaskKind.parse(task)
    except DaaError as exc:
        raise _Fail(str(exc))
    bindings = []
    for raw in inputs:
        parts = raw.split(":")
        if parts[0] == "source" and len(parts) == 2:
            bindings.append(InputBinding(source=int(parts[1])))
        elif parts[0] == "step" and len(parts) in (2, 3):
            bindings.append(
                InputBinding(step=parts[1], slot=int(parts[2]) if len(parts) == 3 else 0)
            )
        else:
            raise click.UsageError(f"--input expects source:<i> or step:<id>:<slot>, got {raw!r}")
    sid = step_id or f"s{len(spec.steps) + 1}"
    step = StepSpec(
        step_id=sid,
        task=kind,
        processor_id=processor_id,
        params=_parse_params(params),
        inputs=tuple(bindings),
    )
    spec = PipelineSpec(
        name=spec.name,
        steps=spec.steps + (step,),
        description=spec.description,
        schema_version=spec.schema_version,
        created_at=spec.created_at,
    )
    Path(file).write_bytes(export_pipeline(spec))
    click.echo(f"added step {sid}")


@pipeline_group.command("validate")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--catalog", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--json", "as_json", is_flag=True)
def pipeline_validate(file, catalog, as_json):
    """Check a pipeline against the registry; prints all violations."""
    try:
        spec = import_pipeline(Path(file).read_bytes())
        registry = registry_load(catalog)
    except DaaError as exc:
        raise _Fail(str(exc))
    violations = validate(spec, registry)
    if as_json:
        click.echo(json.dumps({"violations": violations}, sort_keys=True))
    if violations:
        for v in violations:
            click.echo(f"{v['code']}: {v['detail']}", err=True)
        raise SystemExit(EXIT_DOMAIN)
    if not as_json:
        click.echo("ok")


@pipeline_group.command("run")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.argument("wavs", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option("--report", "report_formats", default="json", help="comma list: json,md")
@click.option("--catalog", type=click.Path(exists=True, dir_okay=False), default=None)
def pipeline_run(file, wavs, out_dir, report_formats, catalog):
    """Execute a pipeline locally over one or more WAV files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        spec = import_pipeline(Path(file).read_bytes())
        registry = registry_load(catalog)
        report = execute(spec, list(wavs), registry, out_dir=out)
    except ValidationFailed as exc:
        for v in exc.violations:
            click.echo(f"{v['code']}: {v['detail']}", err=True)
        raise SystemExit(EXIT_DOMAIN)
    except DaaError as exc:
        raise _Fail(str(exc))
    formats = [f.strip() for f in report_formats.split(",") if f.strip()]
    for fmt in formats:
        if fmt in ("md", "markdown"):
            (out / "report.md").write_bytes(render_report(report, "markdown"))
        elif fmt == "json":
            (out / "report.json").write_bytes(render_report(report, "json"))
        else:
            raise click.UsageError(f"unknown report format {fmt!r}")
    if "json" not in formats:
        (out / "report.json").write_bytes(render_report(report, "json"))
    statuses = [s["status"] for section in report.results for s in section["steps"]]
    failed = sum(1 for s in statuses if s != "done")
    click.echo(f"run {report.run_id}: {len(statuses) - failed}/{len(statuses)} steps done")
    if failed:
        raise SystemExit(EXIT_PARTIAL)


@main.command("rate")
@click.argument("report_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--input", "input_index", type=int, required=True)
@click.option("--step", "step_id", required=True)
@click.option("--rating", type=int, required=True)
def rate_cmd(report_path, input_index, step_id, rating):
    """Attach a 1-10 rating to a step result inside a report file."""
    try:
        report = RunReport.from_json_dict(json.loads(Path(report_path).read_text(encoding="utf-8")))
        set_rating(report, input_index, step_id, rating)
    except DaaError as exc:
        raise _Fail(str(exc))
    Path(report_path).write_bytes(render_report(report, "json"))
    click.echo(f"rated input {input_index} step {step_id}: {rating}/10")


# --- evaluation ---

@main.group("eval")
def eval_group():
    """Metric evaluation: wer/cer, bss, stoi, manifest batches."""


def _norm_options(fn):
    fn = click.option("--no-lowercase", is_flag=True, help="keep case")(fn)
    fn = click.option("--keep-punct", is_flag=True, help="keep punctuation")(fn)
    return fn


@eval_group.command("wer")
@click.option("--ref", required=True, help="text, file path, or - for stdin")
@click.option("--hyp", required=True)
@_norm_options
@click.option("--json", "as_json", is_flag=True)
def eval_wer(ref, hyp, no_lowercase, keep_punct, as_json):
    norm = TextNorm(lowercase=not no_lowercase, strip_punct=not keep_punct)
    result = wer(_text_arg(ref), _text_arg(hyp), norm)
    _emit(as_json, {"wer": result.to_json_dict()},
          "inf%" if result.undefined else f"{result.rate * 100:.2f}%")


@eval_group.command("cer")
@click.option("--ref", required=True)
@click.option("--hyp", required=True)
@_norm_options
@click.option("--json", "as_json", is_flag=True)
def eval_cer(ref, hyp, no_lowercase, keep_punct, as_json):
    norm = TextNorm(lowercase=not no_lowercase, strip_punct=not keep_punct)
    result = cer(_text_arg(ref), _text_arg(hyp), norm)
    _emit(as_json, {"cer": result.to_json_dict()},
          "inf%" if result.undefined else f"{result.rate * 100:.2f}%")


@eval_group.command("bss")
@click.option("--ref", "refs", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--est", "ests", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--taps", type=int, default=512)
@click.option("--json", "as_json", is_flag=True)
def eval_bss(refs, ests, taps, as_json):
    """Separation scores (SNR/SDR/SI-SNR/SI-SDR) under the best permutation."""
    try:
        scores = pit_assign([load_wav(p) for p in refs], [load_wav(p) for p in ests], taps=taps)
    except DaaError as exc:
        raise _Fail(str(exc))
    doc = scores.to_json_dict()
    human = (
        f"permutation {doc['permutation']}  "
        f"SNR {scores.mean_snr:.4f} dB  SDR {scores.mean_sdr:.4f} dB  "
        f"SI-SNR {scores.mean_si_snr:.4f} dB  SI-SDR {scores.mean_si_sdr:.4f} dB"
    )
    _emit(as_json, doc, human)


@eval_group.command("stoi")
@click.option("--ref", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--est", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
def eval_stoi(ref, est, as_json):
    try:
        score = stoi(load_wav(ref), load_wav(est))
    except DaaError as exc:
        raise _Fail(str(exc))
    _emit(as_json, score.to_json_dict(), f"{score.value:.4f}")


@eval_group.command("manifest")
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--metrics", required=True, help="comma list: wer,cer,snr,sdr,si_snr,si_sdr,stoi")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="write JSON report here")
@click.option("--csv-out", type=click.Path(dir_okay=False), help="write CSV mirror here")
@_norm_options
@click.option("--json", "as_json", is_flag=True)
def eval_manifest(csv_path, metrics, out_path, csv_out, no_lowercase, keep_punct, as_json):
    """Evaluate every row of a manifest CSV (columns id,reference,hypothesis)."""
    wanted = [m.strip() for m in metrics.split(",") if m.strip()]
    unknown = [m for m in wanted if m not in TEXT_METRICS + SIGNAL_METRICS]
    if unknown:
        raise click.UsageError(f"unknown metrics: {', '.join(unknown)}")
    norm = TextNorm(lowercase=not no_lowercase, strip_punct=not keep_punct)
    try:
        report = evaluate_manifest(csv_path, wanted, norm)
    except DaaError as exc:
        raise _Fail(str(exc))
    if out_path:
        Path(out_path).write_text(
            json.dumps(report, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    if csv_out:
        Path(csv_out).write_text(report_to_csv(report), encoding="utf-8")
    if as_json:
        click.echo(json.dumps(report, sort_keys=True))
    else:
        for key, value in sorted(report["aggregates"].items()):
            shown = "n/a" if value is None else f"{value:.4f}"
            click.echo(f"{key}: {shown}")
    if report["counts"]["rows"] == 0:
        click.echo("manifest is empty", err=True)
        raise SystemExit(EXIT_DOMAIN)
    if report["counts"]["failed"]:
        click.echo(f"{report['counts']['failed']} row(s) failed", err=True)
        raise SystemExit(EXIT_PARTIAL)


# --- models & service ---

@main.group("models")
def models_group():
    """Browse the processor registry."""


@models_group.command("list")
@click.option("--task", default=None)
@click.option("--catalog", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--seed", "use_seed", is_flag=True, help="include the packaged benchmark catalog")
@click.option("--json", "as_json", is_flag=True)
def models_list(task, catalog, use_seed, as_json):
    try:
        registry = registry_load(catalog if catalog else (seed_catalog_path() if use_seed else None))
        kind = TaskKind.parse(task) if task else None
    except DaaError as exc:
        raise _Fail(str(exc))
    models = registry.list(kind)
    if as_json:
        click.echo(json.dumps({"models": [d.to_json_dict() for d in models]}, sort_keys=True))
        return
    for d in models:
        perf = "; ".join(
            f"{p['metric']}={p['value']}" + (f" ({p['split']})" if p.get("split") else "")
            for p in d.metadata.get("reported_performance", [])
        )
        dataset = d.metadata.get("training_dataset", "-")
        click.echo(f"{d.task.value:4} {d.id:40} {d.provenance:8} {dataset:18} {perf}")


@main.command("serve")
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
@click.option("--data-dir", required=True, type=click.Path(file_okay=False))
@click.option("--catalog", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--token", default=None)
def serve_cmd(port, host, data_dir, catalog, token):
    """Run the REST service."""
    from .service import serve

    serve(port=port, data_dir=data_dir, catalog_path=catalog, token=token, host=host)


if __name__ == "__main__":
    main()
