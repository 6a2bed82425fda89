// Runs page: pick a saved pipeline and one or more uploads, launch, poll
// progress, inspect per-step outputs, rate them 1-10, download reports.

import { ApiClient, ApiError } from "../api.js";
import { banner, clear, download, el } from "../dom.js";
import type { RunReportDoc, StepOutputDoc, StepResultDoc } from "../types.js";

export function runsPage(api: ApiClient): HTMLElement {
  const root = el("section", { class: "page" });
  const status = el("div", {});
  const pipelineSelect = el("select", {});
  const audioBox = el("div", { class: "audio-list" });
  const progress = el("progress", { value: "0", max: "1" });
  const resultBox = el("div", {});

  let currentRunId: string | null = null;
  let pollTimer: number | null = null;

  function stopPolling(): void {
    if (pollTimer !== null) {
      window.clearInterval(pollTimer);
      pollTimer = null;
    }
  }

  async function refresh(): Promise<void> {
    const [pipelines, audio] = await Promise.all([api.listPipelines(), api.listAudio()]);
    clear(pipelineSelect);
    for (const p of pipelines) {
      pipelineSelect.append(
        el("option", { value: p.pipeline_id }, `${p.name} (${p.steps} steps)`),
      );
    }
    clear(audioBox);
    for (const a of audio) {
      const box = el("input", { type: "checkbox", value: a.audio_id });
      audioBox.append(el("label", { class: "audio-item" }, box, ` ${a.filename}`));
    }
  }

  const launchBtn = el("button", { class: "primary" }, "launch");
  launchBtn.addEventListener("click", async () => {
    const ids = Array.from(audioBox.querySelectorAll("input:checked")).map(
      (n) => (n as HTMLInputElement).value,
    );
    if (!pipelineSelect.value || ids.length === 0) {
      status.replaceChildren(banner("error", "pick a pipeline and at least one file"));
      return;
    }
    try {
      status.replaceChildren();
      resultBox.replaceChildren();
      const job = await api.runPipeline(pipelineSelect.value, ids);
      stopPolling();
      pollTimer = window.setInterval(async () => {
        try {
          const state = await api.getJob(job.job_id);
          progress.max = Math.max(1, state.progress.total);
          progress.value = state.progress.completed;
          if (state.state === "done" || state.state === "failed") {
            stopPolling();
            if (state.state === "failed") {
              status.replaceChildren(banner("error", state.error ?? "run failed"));
              return;
            }
            currentRunId = (state.result as { run_id: string }).run_id;
            renderReport(await api.getReport(currentRunId));
          }
        } catch (err) {
          stopPolling();
          status.replaceChildren(banner("error", String(err)));
        }
      }, 250);
    } catch (err) {
      const detail = err instanceof ApiError ? err.message : String(err);
      status.replaceChildren(banner("error", detail));
    }
  });

  function renderOutput(out: StepOutputDoc): HTMLElement {
    if (out.kind === "audio" && out.artifact) {
      return el("p", {}, `${out.slot}: audio ${out.duration_s?.toFixed(2)}s, artifact ${out.artifact.slice(0, 12)}…`);
    }
    if (out.kind === "text") {
      return el("blockquote", {}, out.text ?? "");
    }
    if (out.kind === "labels") {
      return el("p", {},
        (out.labels ?? []).map((l) => `${l.label} ${(l.score * 100).toFixed(0)}%`).join(", "));
    }
    if (out.kind === "segments") {
      const table = el("table", {},
        el("tr", {}, el("th", {}, "start (s)"), el("th", {}, "end (s)")));
      for (const seg of out.segments ?? []) {
        table.append(el("tr", {},
          el("td", {}, seg.start_s.toFixed(3)), el("td", {}, seg.end_s.toFixed(3))));
      }
      return table;
    }
    return el("p", {}, `${out.slot}: ${out.rows}x${out.frames} ${out.row_axis ?? ""}`);
  }

  function ratingControl(inputIndex: number, step: StepResultDoc): HTMLElement {
    const select = el("select", {});
    select.append(el("option", { value: "" }, "rate…"));
    for (let i = 1; i <= 10; i++) {
      select.append(el("option", { value: String(i) }, String(i)));
    }
    if (step.rating !== null) {
      select.value = String(step.rating);
    }
    select.addEventListener("change", async () => {
      if (!currentRunId || !select.value) {
        return;
      }
      try {
        await api.rateStep(currentRunId, inputIndex, step.step_id, Number(select.value));
        status.replaceChildren(banner("info", `rated ${step.step_id}: ${select.value}/10`));
      } catch (err) {
        status.replaceChildren(banner("error", String(err)));
      }
    });
    return el("label", {}, "rating ", select);
  }

  function renderReport(report: RunReportDoc): void {
    clear(resultBox);
    for (const section of report.results) {
      const box = el("div", { class: "input-result" },
        el("h3", {}, `Input ${section.input_index}: ${section.input_name}`));
      for (const step of section.steps) {
        const stepBox = el("div", { class: `step-result ${step.status}` },
          el("h4", {}, `${step.step_id} — ${step.task}/${step.processor_id} [${step.status}]`));
        if (step.error) {
          stepBox.append(banner("error", step.error));
        }
        for (const out of step.outputs) {
          stepBox.append(renderOutput(out));
        }
        stepBox.append(ratingControl(section.input_index, step));
        box.append(stepBox);
      }
      resultBox.append(box);
    }
    const dlJson = el("button", {}, "download report.json");
    dlJson.addEventListener("click", async () => {
      if (currentRunId) {
        const again = await api.getReport(currentRunId);
        download("report.json", JSON.stringify(again, null, 2), "application/json");
      }
    });
    const dlMd = el("button", {}, "download report.md");
    dlMd.addEventListener("click", async () => {
      if (currentRunId) {
        download("report.md", await api.getReportMarkdown(currentRunId), "text/markdown");
      }
    });
    resultBox.append(el("div", { class: "row" }, dlJson, dlMd));
  }

  refresh().catch((err) => status.replaceChildren(banner("error", `backend unreachable: ${err}`)));

  root.append(
    el("h2", {}, "Runs"),
    el("div", { class: "row" }, pipelineSelect, launchBtn, progress),
    audioBox,
    status,
    resultBox,
  );
  return root;
}
