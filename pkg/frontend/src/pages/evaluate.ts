// Evaluate page: WER/CER text forms, BSS/STOI over uploaded audio pairs,
// and manifest CSV upload; results in a table.

import { ApiClient } from "../api.js";
import { banner, clear, el } from "../dom.js";
import type { AudioEntry } from "../types.js";

export function evaluatePage(api: ApiClient): HTMLElement {
  const root = el("section", { class: "page" });
  const status = el("div", {});
  const results = el("div", {});

  function renderRows(rows: Record<string, unknown>[]): void {
    clear(results);
    if (rows.length === 0) {
      results.append(el("p", {}, "no rows"));
      return;
    }
    const metricNames = new Set<string>();
    for (const row of rows) {
      Object.keys((row.metrics as Record<string, unknown>) ?? {}).forEach((k) => {
        if (!k.endsWith("_counts")) {
          metricNames.add(k);
        }
      });
    }
    const cols = Array.from(metricNames);
    const table = el("table", { class: "results" });
    table.append(el("tr", {},
      el("th", {}, "id"),
      ...cols.map((c) => el("th", {}, c)),
      el("th", {}, "error")));
    for (const row of rows) {
      const metrics = (row.metrics as Record<string, number | null>) ?? {};
      table.append(el("tr", {},
        el("td", {}, String(row.id)),
        ...cols.map((c) => el("td", {},
          metrics[c] === undefined || metrics[c] === null ? "—" : (metrics[c] as number).toFixed(4))),
        el("td", {}, String(row.error ?? ""))));
    }
    results.append(table);
  }

  async function runJob(body: Parameters<ApiClient["evaluate"]>[0]): Promise<void> {
    try {
      status.replaceChildren(banner("info", "evaluating…"));
      const job = await api.waitJob((await api.evaluate(body)).job_id);
      if (job.state === "failed") {
        throw new Error(job.error ?? "evaluation failed");
      }
      const report = job.result?.report as { rows: Record<string, unknown>[] };
      status.replaceChildren();
      renderRows(report.rows);
    } catch (err) {
      status.replaceChildren(banner("error", String(err)));
    }
  }

  // --- text form ---
  const refBox = el("textarea", { placeholder: "reference transcript" });
  const hypBox = el("textarea", { placeholder: "hypothesis transcript" });
  const textBtn = el("button", { class: "primary" }, "WER / CER");
  textBtn.addEventListener("click", () =>
    runJob({
      metrics: ["wer", "cer"],
      pairs: [{ id: "pair", reference: refBox.value, hypothesis: hypBox.value }],
    }),
  );

  // --- signal form ---
  const refSelect = el("select", {});
  const estSelect = el("select", {});
  const signalMetrics = el("select", {},
    el("option", { value: "snr,si_snr,si_sdr,sdr" }, "SNR family"),
    el("option", { value: "stoi" }, "STOI"),
    el("option", { value: "snr,si_snr,si_sdr,sdr,stoi" }, "all"));
  const signalBtn = el("button", { class: "primary" }, "evaluate audio pair");
  signalBtn.addEventListener("click", () =>
    runJob({
      metrics: signalMetrics.value.split(","),
      pairs: [{
        id: "pair",
        reference_audio_id: refSelect.value,
        hypothesis_audio_id: estSelect.value,
      }],
    }),
  );

  // --- manifest form ---
  const manifestInput = el("input", { type: "file", accept: ".csv" });
  const manifestMetrics = el("input", { value: "wer,cer" });
  const manifestBtn = el("button", { class: "primary" }, "evaluate manifest");
  manifestBtn.addEventListener("click", async () => {
    const file = manifestInput.files?.[0];
    if (!file) {
      status.replaceChildren(banner("error", "choose a manifest CSV"));
      return;
    }
    await runJob({
      metrics: manifestMetrics.value.split(",").map((m) => m.trim()),
      manifest_csv: await file.text(),
    });
  });

  (async () => {
    try {
      const audio = await api.listAudio();
      const fill = (select: HTMLSelectElement) => {
        for (const a of audio as AudioEntry[]) {
          select.append(el("option", { value: a.audio_id }, a.filename));
        }
      };
      fill(refSelect);
      fill(estSelect);
    } catch (err) {
      status.replaceChildren(banner("error", `backend unreachable: ${err}`));
    }
  })();

  root.append(
    el("h2", {}, "Evaluate"),
    el("h3", {}, "Transcripts"),
    el("div", { class: "row" }, refBox, hypBox, textBtn),
    el("h3", {}, "Audio pair"),
    el("div", { class: "row" },
       el("label", {}, "reference "), refSelect,
       el("label", {}, "estimate "), estSelect,
       signalMetrics, signalBtn),
    el("h3", {}, "Manifest"),
    el("div", { class: "row" }, manifestInput,
       el("label", {}, "metrics "), manifestMetrics, manifestBtn),
    status,
    results,
  );
  return root;
}
