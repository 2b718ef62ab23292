/** Kappa dashboard: per-component agreement over stored annotations. */

import type { ApiClient } from "./api.js";
import { COMPONENTS, componentLabel, type KappaReport } from "./types.js";

export function formatKappa(kappa: number): string {
  return kappa.toFixed(3);
}

export interface AgreementView {
  root: HTMLElement;
  refresh(): Promise<void>;
}

export async function renderAgreementView(
  root: HTMLElement,
  api: ApiClient,
  component?: string,
): Promise<AgreementView> {
  const doc = root.ownerDocument;

  const el = (tag: string, cls?: string, text?: string): HTMLElement => {
    const node = doc.createElement(tag);
    if (cls) node.className = cls;
    if (text !== undefined) node.textContent = text;
    return node;
  };

  const refresh = async () => {
    const report: KappaReport = await api.getKappa(component);
    root.textContent = "";
    root.className = "agreement-view";
    root.append(el("h2", undefined, "Inter-annotator agreement"));

    if (report.scenario_count === 0) {
      root.append(el("div", "empty-state",
        report.reason ?? "no annotations yet"));
      return;
    }

    root.append(el("p", "meta",
      `scenarios: ${report.scenario_count}, annotators per scenario: ` +
      `${report.annotator_count ?? "varies"}`));
    if (report.reason) {
      root.append(el("div", "banner warning", report.reason));
    }

    const table = el("table", "kappa-table");
    const head = el("tr");
    head.append(
      el("th", undefined, "component"),
      el("th", undefined, "kappa"),
      el("th", undefined, "band"),
    );
    table.append(head);
    const order = COMPONENTS.map((c) => c.field).filter(
      (f) => f in report.components);
    for (const field of order) {
      const entry = report.components[field];
      const row = el("tr");
      row.dataset.component = field;
      row.append(el("td", undefined, componentLabel(field)));
      if (entry.kappa === null) {
        row.append(
          el("td", "kappa-value", "n/a"),
          el("td", "kappa-band", entry.reason ?? ""),
        );
      } else {
        row.append(
          el("td", "kappa-value", formatKappa(entry.kappa)),
          el("td", "kappa-band", entry.band ?? ""),
        );
      }
      table.append(row);
    }
    root.append(table);
  };

  await refresh();
  return { root, refresh };
}
