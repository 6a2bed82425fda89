// Models page: registry browser with the published performance metadata.

import { ApiClient } from "../api.js";
import { banner, clear, el } from "../dom.js";
import type { ModelDoc, TaskCode } from "../types.js";

interface Reported {
  metric: string;
  value: string;
  split: string | null;
}

export function modelsPage(api: ApiClient): HTMLElement {
  const root = el("section", { class: "page" });
  const status = el("div", {});
  const taskSelect = el("select", {});
  const table = el("table", { class: "models" });

  async function render(task: TaskCode): Promise<void> {
    clear(table);
    table.append(el("tr", {},
      el("th", {}, "id"), el("th", {}, "system"), el("th", {}, "origin"),
      el("th", {}, "training dataset"), el("th", {}, "reported performance"),
      el("th", {}, "outputs")));
    const models = await api.listModels(task);
    for (const m of models as ModelDoc[]) {
      const reported = (m.metadata.reported_performance as Reported[] | undefined) ?? [];
      const perf = reported
        .map((p) => `${p.metric}=${p.value}${p.split ? ` (${p.split})` : ""}`)
        .join(", ");
      table.append(el("tr", {},
        el("td", {}, el("code", {}, m.id)),
        el("td", {}, String(m.metadata.system ?? "—")),
        el("td", {}, m.provenance),
        el("td", {}, String(m.metadata.training_dataset ?? "—")),
        el("td", {}, perf || "—"),
        el("td", {}, m.output_slots.map((s) => `${s.name}:${s.kind}`).join(", "))));
    }
  }

  taskSelect.addEventListener("change", () => {
    render(taskSelect.value as TaskCode).catch((err) =>
      status.replaceChildren(banner("error", String(err))));
  });

  (async () => {
    try {
      for (const t of await api.listTasks()) {
        taskSelect.append(el("option", { value: t.code }, `${t.code} — ${t.name}`));
      }
      taskSelect.dispatchEvent(new Event("change"));
    } catch (err) {
      status.replaceChildren(banner("error", `backend unreachable: ${err}`));
    }
  })();

  root.append(el("h2", {}, "Models"), el("div", { class: "row" }, taskSelect), status, table);
  return root;
}
