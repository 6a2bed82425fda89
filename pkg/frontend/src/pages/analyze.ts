// Analyze page: upload or record audio, pick any catalog feature, inspect
// the heatmap with an exact-value cursor readout.

import { ApiClient, ApiError } from "../api.js";
import { banner, clear, el } from "../dom.js";
import { axisName, drawHeatmap, readoutAt } from "../heatmap.js";
import { MicRecorder } from "../recorder.js";
import type { AudioEntry, FeatureInfo, FeatureMatrixDoc } from "../types.js";

export function analyzePage(api: ApiClient): HTMLElement {
  const root = el("section", { class: "page" });
  const status = el("div", {});
  const audioSelect = el("select", { class: "audio-select" });
  const featureSelect = el("select", {});
  const paramsBox = el("div", { class: "params" });
  const canvas = el("canvas", { class: "heatmap" });
  const readout = el("div", { class: "readout" }, "hover the heatmap for bin values");
  const player = el("audio", { controls: "" });

  let features: FeatureInfo[] = [];
  let currentMatrix: FeatureMatrixDoc | null = null;

  async function refreshAudio(selectId?: string): Promise<void> {
    const items = await api.listAudio();
    clear(audioSelect);
    for (const item of items) {
      audioSelect.append(
        el("option", { value: item.audio_id },
           `${item.filename} (${item.duration_s.toFixed(2)}s @ ${item.sample_rate} Hz)`),
      );
    }
    if (selectId) {
      audioSelect.value = selectId;
    }
    audioSelect.dispatchEvent(new Event("change"));
  }

  audioSelect.addEventListener("change", () => {
    if (audioSelect.value) {
      player.src = api.audioUrl(audioSelect.value);
    }
  });

  function renderParams(info: FeatureInfo): void {
    clear(paramsBox);
    for (const [key, meta] of Object.entries(info.params)) {
      const input = el("input", {
        name: key,
        placeholder: meta.default === null ? "" : String(meta.default),
      });
      paramsBox.append(el("label", {}, `${key} `, input));
    }
  }

  featureSelect.addEventListener("change", () => {
    const info = features.find((f) => f.name === featureSelect.value);
    if (info) {
      renderParams(info);
    }
  });

  const upload = el("input", { type: "file", accept: ".wav,audio/wav" });
  upload.addEventListener("change", async () => {
    const file = upload.files?.[0];
    if (!file) {
      return;
    }
    try {
      const entry: AudioEntry = await api.uploadAudio(file.name, file);
      status.replaceChildren(banner("info", `uploaded ${entry.filename} (${entry.sha256.slice(0, 12)})`));
      await refreshAudio(entry.audio_id);
    } catch (err) {
      status.replaceChildren(banner("error", String(err)));
    }
  });

  const recorder = new MicRecorder();
  const recordBtn = el("button", {}, "record");
  recordBtn.addEventListener("click", async () => {
    try {
      if (!recorder.recording) {
        await recorder.start();
        recordBtn.textContent = "stop";
        return;
      }
      const { wav, durationS } = await recorder.stop();
      recordBtn.textContent = "record";
      const name = `recording-${Date.now()}.wav`;
      const entry = await api.uploadAudio(name, wav);
      status.replaceChildren(banner("info", `recorded ${durationS.toFixed(1)}s as ${entry.filename}`));
      await refreshAudio(entry.audio_id);
    } catch (err) {
      recordBtn.textContent = "record";
      status.replaceChildren(banner("error", String(err)));
    }
  });

  const runBtn = el("button", { class: "primary" }, "extract");
  runBtn.addEventListener("click", async () => {
    if (!audioSelect.value || !featureSelect.value) {
      return;
    }
    const params: Record<string, string> = {};
    paramsBox.querySelectorAll("input").forEach((input) => {
      if (input.value !== "") {
        params[input.name] = input.value;
      }
    });
    try {
      status.replaceChildren();
      currentMatrix = await api.computeFeature(audioSelect.value, featureSelect.value, params);
      drawHeatmap(canvas, currentMatrix);
      const axis = axisName(currentMatrix.row_axis);
      readout.textContent =
        `${currentMatrix.data.length} rows (${axis}) x ${currentMatrix.frame_times.length} frames`;
    } catch (err) {
      const detail = err instanceof ApiError ? err.message : String(err);
      status.replaceChildren(banner("error", detail));
    }
  });

  canvas.addEventListener("mousemove", (event) => {
    if (!currentMatrix) {
      return;
    }
    const rect = canvas.getBoundingClientRect();
    const info = readoutAt(
      currentMatrix,
      (event.clientX - rect.left) / rect.width,
      (event.clientY - rect.top) / rect.height,
    );
    const axis = axisName(currentMatrix.row_axis);
    readout.textContent =
      `t=${info.timeS.toFixed(3)}s  ${axis}=${info.rowLabel}  value=${info.value.toFixed(3)}`;
  });

  (async () => {
    try {
      features = await api.listFeatures();
      for (const f of features) {
        featureSelect.append(el("option", { value: f.name }, f.name));
      }
      featureSelect.dispatchEvent(new Event("change"));
      await refreshAudio();
    } catch (err) {
      status.replaceChildren(banner("error", `backend unreachable: ${err}`));
    }
  })();

  root.append(
    el("h2", {}, "Analyze"),
    el("div", { class: "row" }, upload, recordBtn, audioSelect, player),
    el("div", { class: "row" }, featureSelect, paramsBox, runBtn),
    status,
    canvas,
    readout,
  );
  return root;
}
