// Pipelines page: the step-by-step builder. Each step picks a task, then a
// model from the registry, then binds inputs (a source file or an earlier
// step's audio slot, shown with kinds); "run step now" executes just that
// step so its result informs the next one. Drafts save to the server,
// export to .dap.json, and import back.

import { ApiClient, ApiError, violationSummary } from "../api.js";
import { PipelineDraft } from "../draft.js";
import { banner, clear, download, el } from "../dom.js";
import type { InputBindingDoc, ModelDoc, StepOutputDoc, TaskCode } from "../types.js";

export function pipelinesPage(api: ApiClient): HTMLElement {
  const root = el("section", { class: "page" });
  const status = el("div", {});
  const stepsBox = el("div", { class: "steps" });
  const nameInput = el("input", { value: "new-pipeline", class: "name" });

  let draft = new PipelineDraft("new-pipeline");

  function describeSlots(model: ModelDoc): string {
    return model.output_slots.map((s, i) => `${i}:${s.name}(${s.kind})`).join(" ");
  }

  function renderSteps(): void {
    clear(stepsBox);
    draft.steps.forEach((step, index) => {
      const header = el(
        "div",
        { class: "step-head" },
        el("strong", {}, `${index + 1}. ${step.doc.step_id}`),
        ` ${step.doc.task} / ${step.doc.processor_id} `,
        el("code", {}, step.doc.inputs.map(bindingLabel).join(", ")),
      );
      const body = el("div", { class: "step-body" });
      if (!step.ui.collapsed) {
        for (const msg of step.ui.errorBanners) {
          body.append(banner("error", msg));
        }
        if (step.ui.lastResultPreview !== null) {
          body.append(renderPreview(step.ui.lastResultPreview as StepOutputDoc[]));
        }
      }
      const collapse = el("button", {}, step.ui.collapsed ? "expand" : "collapse");
      collapse.addEventListener("click", () => {
        step.ui.collapsed = !step.ui.collapsed;
        renderSteps();
      });
      const remove = el("button", {}, "remove");
      remove.addEventListener("click", () => {
        draft.removeStep(step.doc.step_id);
        renderSteps();
      });
      const runNow = el("button", {}, "run step now");
      runNow.addEventListener("click", () => runStepNow(step.doc.step_id));
      stepsBox.append(el("div", { class: "step" }, header, el("div", {}, collapse, runNow, remove), body));
    });
  }

  function bindingLabel(b: InputBindingDoc): string {
    return b.source !== undefined ? `source:${b.source}` : `step:${b.step}:${b.slot}`;
  }

  function renderPreview(outputs: StepOutputDoc[]): HTMLElement {
    const box = el("div", { class: "preview" });
    for (const out of outputs) {
      if (out.kind === "text") {
        box.append(el("p", {}, `${out.slot}: ${out.text}`));
      } else if (out.kind === "labels") {
        box.append(
          el("p", {}, `${out.slot}: ` +
            (out.labels ?? []).map((l) => `${l.label} ${(l.score * 100).toFixed(0)}%`).join(", ")),
        );
      } else if (out.kind === "segments") {
        box.append(el("p", {}, `${out.slot}: ${(out.segments ?? []).length} segment(s)`));
      } else if (out.kind === "matrix") {
        box.append(el("p", {}, `${out.slot}: ${out.rows}x${out.frames} ${out.row_axis}`));
      } else {
        box.append(el("p", {}, `${out.slot}: audio ${out.duration_s?.toFixed(2)}s`));
      }
    }
    return box;
  }

  async function runStepNow(stepId: string): Promise<void> {
    const step = draft.step(stepId);
    if (!step) {
      return;
    }
    step.ui.errorBanners = [];
    try {
      const audio = await api.listAudio();
      if (audio.length === 0) {
        throw new Error("upload audio on the Analyze page first");
      }
      // the ad-hoc step takes the newest upload as its source; earlier-step
      // inputs are not materialized in draft mode
      const sourceOnly = step.doc.inputs.every((b) => b.source !== undefined);
      if (!sourceOnly) {
        throw new Error("run-now needs source bindings; run the saved pipeline for chained steps");
      }
      const job = await api.runStep(step.doc, [audio[audio.length - 1].audio_id]);
      const finished = await api.waitJob(job.job_id);
      if (finished.state === "failed") {
        throw new Error(finished.error ?? "job failed");
      }
      const runId = (finished.result as { run_id: string }).run_id;
      const report = await api.getReport(runId);
      step.ui.lastResultPreview = report.results[0].steps[0].outputs;
    } catch (err) {
      step.ui.errorBanners.push(err instanceof ApiError ? err.message : String(err));
    }
    renderSteps();
  }

  // --- add-step form ---
  const taskSelect = el("select", {});
  const modelSelect = el("select", {});
  const inputField = el("input", { value: "source:0", title: "source:<i> or step:<id>:<slot>" });
  const paramsField = el("input", { placeholder: "k=v;k2=v2" });
  const stepIdField = el("input", { placeholder: "step id (auto)" });

  taskSelect.addEventListener("change", async () => {
    clear(modelSelect);
    try {
      const models = await api.listModels(taskSelect.value as TaskCode);
      for (const m of models) {
        modelSelect.append(el("option", { value: m.id }, `${m.id} [${describeSlots(m)}]`));
      }
    } catch (err) {
      status.replaceChildren(banner("error", String(err)));
    }
  });

  const addBtn = el("button", { class: "primary" }, "add step");
  addBtn.addEventListener("click", () => {
    try {
      const inputs = inputField.value.split(",").map((raw) => {
        const parts = raw.trim().split(":");
        if (parts[0] === "source") {
          return { source: Number(parts[1]) };
        }
        if (parts[0] === "step") {
          return { step: parts[1], slot: Number(parts[2] ?? 0) };
        }
        throw new Error(`bad input binding ${raw}`);
      });
      const params: Record<string, string> = {};
      for (const pair of paramsField.value.split(";")) {
        if (pair.includes("=")) {
          const [k, v] = pair.split("=", 2);
          params[k.trim()] = v;
        }
      }
      draft.name = nameInput.value;
      draft.addStep({
        task: taskSelect.value as TaskCode,
        processorId: modelSelect.value,
        inputs,
        params,
        stepId: stepIdField.value || undefined,
      });
      stepIdField.value = "";
      renderSteps();
    } catch (err) {
      status.replaceChildren(banner("error", String(err)));
    }
  });

  // --- save / export / import ---
  const saveBtn = el("button", {}, "save to server");
  saveBtn.addEventListener("click", async () => {
    draft.name = nameInput.value;
    try {
      const id = await api.createPipeline(draft.toDoc());
      status.replaceChildren(banner("info", `saved as ${id}`));
    } catch (err) {
      if (err instanceof ApiError && err.violations.length) {
        draft.violations = err.violations;
        status.replaceChildren(banner("error", violationSummary(err.violations)));
      } else {
        status.replaceChildren(banner("error", String(err)));
      }
    }
  });

  const exportBtn = el("button", {}, "export .dap.json");
  exportBtn.addEventListener("click", () => {
    draft.name = nameInput.value;
    download(`${draft.name}.dap.json`, draft.serialize(), "application/json");
  });

  const importInput = el("input", { type: "file", accept: ".json,.dap.json" });
  importInput.addEventListener("change", async () => {
    const file = importInput.files?.[0];
    if (!file) {
      return;
    }
    try {
      draft = PipelineDraft.fromDoc(JSON.parse(await file.text()));
      nameInput.value = draft.name;
      renderSteps();
      status.replaceChildren(banner("info", `imported ${file.name}`));
    } catch (err) {
      status.replaceChildren(banner("error", `import failed: ${err}`));
    }
  });

  (async () => {
    try {
      const tasks = await api.listTasks();
      for (const t of tasks) {
        taskSelect.append(el("option", { value: t.code }, `${t.code} — ${t.name}`));
      }
      taskSelect.dispatchEvent(new Event("change"));
    } catch (err) {
      status.replaceChildren(banner("error", `backend unreachable: ${err}`));
    }
  })();

  root.append(
    el("h2", {}, "Pipelines"),
    el("div", { class: "row" }, el("label", {}, "name "), nameInput, saveBtn, exportBtn, importInput),
    el("div", { class: "row" },
       taskSelect, modelSelect,
       el("label", {}, "inputs "), inputField,
       el("label", {}, "params "), paramsField,
       stepIdField, addBtn),
    status,
    stepsBox,
  );
  renderSteps();
  return root;
}
