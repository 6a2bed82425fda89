// Hash-routed single page application; one ApiClient per page view so a
// base-URL change takes effect on navigation. Job polls are owned by the
// page elements and dropped with them on route change.

import { ApiClient } from "./api.js";
import { getBaseUrl, setBaseUrl } from "./config.js";
import { clear, el } from "./dom.js";
import { analyzePage } from "./pages/analyze.js";
import { evaluatePage } from "./pages/evaluate.js";
import { modelsPage } from "./pages/models.js";
import { pipelinesPage } from "./pages/pipelines.js";
import { runsPage } from "./pages/runs.js";

const PAGES: Record<string, (api: ApiClient) => HTMLElement> = {
  analyze: analyzePage,
  pipelines: pipelinesPage,
  runs: runsPage,
  evaluate: evaluatePage,
  models: modelsPage,
};

function currentRoute(): string {
  const hash = window.location.hash.replace(/^#\/?/, "");
  return hash in PAGES ? hash : "analyze";
}

export function mount(root: HTMLElement): void {
  const main = el("main", {});
  const offline = el("div", { class: "banner error hidden" }, "backend unreachable");
  const baseInput = el("input", { value: getBaseUrl(), class: "base-url" });
  baseInput.addEventListener("change", () => {
    setBaseUrl(baseInput.value);
    render();
  });

  const nav = el("nav", {},
    ...Object.keys(PAGES).map((name) =>
      el("a", { href: `#/${name}`, class: "nav-link", "data-page": name }, name)),
    el("label", { class: "base-label" }, "backend ", baseInput),
  );

  async function checkConnectivity(api: ApiClient): Promise<void> {
    try {
      await api.listTasks();
      offline.classList.add("hidden");
    } catch {
      offline.classList.remove("hidden");
    }
  }

  function render(): void {
    const route = currentRoute();
    nav.querySelectorAll(".nav-link").forEach((link) => {
      link.classList.toggle("active", link.getAttribute("data-page") === route);
    });
    const api = new ApiClient(getBaseUrl());
    clear(main);
    main.append(PAGES[route](api));
    void checkConnectivity(api);
  }

  window.addEventListener("hashchange", render);
  root.append(el("h1", {}, "audio analysis workbench"), nav, offline, main);
  render();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount(document.getElementById("app") as HTMLElement);
}
