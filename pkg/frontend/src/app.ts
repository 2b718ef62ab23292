/** Hash-routed shell tying the three views together. */

import { renderAgreementView } from "./agreement.js";
import { renderAnnotateView } from "./annotate.js";
import { ApiClient } from "./api.js";
import { renderInspectView } from "./inspect.js";

export type Route =
  | { view: "list" }
  | { view: "annotate"; scenarioId: string; annotatorId: string }
  | {
      view: "inspect";
      scenarioId: string;
      promptId: string;
      runId: string;
      inspectorId: string;
      gtAnnotatorId?: string;
    }
  | { view: "agreement"; component?: string };

export function parseRoute(hash: string): Route {
  const [path, queryPart] = hash.replace(/^#\/?/, "").split("?");
  const query = new URLSearchParams(queryPart ?? "");
  const parts = path.split("/").filter(Boolean);
  if (parts[0] === "annotate" && parts.length === 3) {
    return {
      view: "annotate",
      scenarioId: parts[1],
      annotatorId: parts[2],
    };
  }
  if (parts[0] === "inspect" && parts.length === 2) {
    return {
      view: "inspect",
      scenarioId: parts[1],
      promptId: query.get("prompt") ?? "seed",
      runId: query.get("run") ?? "",
      inspectorId: query.get("inspector") ?? "anon",
      gtAnnotatorId: query.get("gt") ?? undefined,
    };
  }
  if (parts[0] === "agreement") {
    return { view: "agreement", component: query.get("component") ?? undefined };
  }
  return { view: "list" };
}

async function renderListView(
  root: HTMLElement,
  api: ApiClient,
): Promise<void> {
  const doc = root.ownerDocument;
  const scenarios = await api.listScenarios();
  root.textContent = "";
  root.className = "list-view";
  const heading = doc.createElement("h2");
  heading.textContent = "Scenarios";
  root.append(heading);
  const table = doc.createElement("table");
  table.className = "scenario-table";
  for (const s of scenarios) {
    const row = doc.createElement("tr");
    const link = (href: string, text: string) => {
      const a = doc.createElement("a");
      a.href = href;
      a.textContent = text;
      return a;
    };
    const cell = (child: Node | string) => {
      const td = doc.createElement("td");
      td.append(child);
      return td;
    };
    row.append(
      cell(s.id),
      cell(`${s.app_name}: ${s.screen_title}`),
      cell(s.category),
      cell(link(`#/annotate/${s.id}/a1`, "annotate")),
      cell(link(`#/inspect/${s.id}`, "inspect")),
    );
    table.append(row);
  }
  root.append(table);
}

export function mountApp(root: HTMLElement, api: ApiClient): void {
  const doc = root.ownerDocument;
  const win = doc.defaultView;
  root.textContent = "";

  const nav = doc.createElement("nav");
  for (const [href, label] of [
    ["#/", "scenarios"],
    ["#/agreement", "agreement"],
  ] as const) {
    const a = doc.createElement("a");
    a.href = href;
    a.textContent = label;
    nav.append(a);
  }
  const outlet = doc.createElement("main");
  root.append(nav, outlet);

  const show = async () => {
    const route = parseRoute(win?.location.hash ?? "");
    try {
      if (route.view === "annotate") {
        await renderAnnotateView(
          outlet, api, route.scenarioId, route.annotatorId);
      } else if (route.view === "inspect") {
        await renderInspectView(outlet, api, route);
      } else if (route.view === "agreement") {
        await renderAgreementView(outlet, api, route.component);
      } else {
        await renderListView(outlet, api);
      }
    } catch (err) {
      outlet.textContent = "";
      const box = doc.createElement("div");
      box.className = "banner error";
      box.textContent = err instanceof Error ? err.message : String(err);
      outlet.append(box);
    }
  };

  win?.addEventListener("hashchange", () => void show());
  void show();
}

// browser bootstrap; absent under tests, which mount views directly
if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) mountApp(root, new ApiClient());
}
