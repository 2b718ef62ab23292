/** Checklist inspection view: prediction beside reference, 16 questions. */

import type { ApiClient } from "./api.js";
import {
  COMPONENTS,
  type ChecklistQuestion,
  type DefectRecordPayload,
  type Scenario,
  type SpanData,
  type StoredDefectRecord,
  type YesNo,
} from "./types.js";

export interface InspectOptions {
  scenarioId: string;
  promptId: string;
  runId: string;
  inspectorId: string;
  /** Annotator whose saved spans provide the reference column. */
  gtAnnotatorId?: string;
}

export interface InspectView {
  root: HTMLElement;
  setAnswer(qid: string, answer: YesNo): void;
  setNote(qid: string, note: string): void;
  sheetComplete(): boolean;
  submit(): Promise<StoredDefectRecord[]>;
  refreshSummary(): Promise<void>;
}

interface SheetState {
  answers: Map<string, YesNo>;
  notes: Map<string, string>;
}

// Sheets are keyed by (scenario, prompt): switching presets for the same
// scenario gets an independent sheet, and navigating back restores it.
const sheets = new Map<string, SheetState>();

function sheetFor(scenarioId: string, promptId: string): SheetState {
  const key = `${scenarioId} ${promptId}`;
  let state = sheets.get(key);
  if (!state) {
    state = { answers: new Map(), notes: new Map() };
    sheets.set(key, state);
  }
  return state;
}

/** Reference components from saved spans: document order per component. */
export function spansToComponents(
  spans: SpanData[],
): Record<string, string[]> {
  const result: Record<string, string[]> = {};
  for (const info of COMPONENTS) {
    result[info.field] = spans
      .filter((s) => s.component === info.field)
      .sort((a, b) => a.start - b.start || a.end - b.end)
      .map((s) => s.text);
  }
  return result;
}

export async function renderInspectView(
  root: HTMLElement,
  api: ApiClient,
  opts: InspectOptions,
): Promise<InspectView> {
  const doc = root.ownerDocument;
  const scenario: Scenario = await api.getScenario(opts.scenarioId);
  const prediction = await api.getPrediction(opts.runId, opts.scenarioId);
  const checklist: ChecklistQuestion[] = await api.getChecklist();
  const reference = opts.gtAnnotatorId
    ? await api.getAnnotation(opts.scenarioId, opts.gtAnnotatorId)
    : null;
  const referenceComponents = reference
    ? spansToComponents(reference.spans)
    : null;
  const state = sheetFor(opts.scenarioId, opts.promptId);

  const el = (tag: string, cls?: string, text?: string): HTMLElement => {
    const node = doc.createElement(tag);
    if (cls) node.className = cls;
    if (text !== undefined) node.textContent = text;
    return node;
  };

  root.textContent = "";
  root.className = "inspect-view";
  root.append(
    el("h2", undefined,
      `${scenario.app_name}: ${scenario.screen_title}`),
    el("p", "meta",
      `${scenario.id}, prompt ${opts.promptId}, run ${opts.runId}, ` +
      `inspecting as ${opts.inspectorId}`),
  );

  // side-by-side component table
  const table = el("table", "component-table");
  const head = el("tr");
  head.append(
    el("th", undefined, "component"),
    el("th", undefined, "prediction"),
    el("th", undefined, "reference"),
  );
  table.append(head);
  for (const info of COMPONENTS) {
    const row = el("tr");
    row.dataset.component = info.field;
    const predCell = el("td", "pred-cell",
      (prediction.components[info.field] ?? []).join("; ") || "(empty)");
    const refCell = el("td", "ref-cell",
      referenceComponents
        ? (referenceComponents[info.field].join("; ") || "(empty)")
        : "(no reference annotations)");
    row.append(el("td", undefined, info.label), predCell, refCell);
    table.append(row);
  }
  root.append(table);

  // the 16-question sheet
  const form = el("div", "sheet");
  const submitButton = el(
    "button", "submit-button", "Submit sheet") as HTMLButtonElement;
  const status = el("p", "status");
  const summaryBox = el("div", "summary-box");

  const updateSubmit = () => {
    submitButton.disabled = !sheetComplete();
  };

  const sheetComplete = (): boolean =>
    checklist.every((q) => state.answers.has(q.qid));

  const setAnswer = (qid: string, answer: YesNo) => {
    state.answers.set(qid, answer);
    const radio = form.querySelector<HTMLInputElement>(
      `input[name="${qid}"][value="${answer}"]`);
    if (radio) radio.checked = true;
    updateSubmit();
  };

  const setNote = (qid: string, note: string) => {
    state.notes.set(qid, note);
    const input = form.querySelector<HTMLInputElement>(
      `input[data-note="${qid}"]`);
    if (input && input.value !== note) input.value = note;
  };

  for (const question of checklist) {
    const row = el("div", "question");
    row.dataset.qid = question.qid;
    row.append(
      el("span", "qid", question.qid),
      el("span", "qtext", question.text),
    );
    for (const value of ["yes", "no"] as const) {
      const label = el("label", "answer");
      const radio = doc.createElement("input");
      radio.type = "radio";
      radio.name = question.qid;
      radio.value = value;
      radio.checked = state.answers.get(question.qid) === value;
      radio.addEventListener("change", () => setAnswer(question.qid, value));
      label.append(radio, doc.createTextNode(value));
      row.append(label);
    }
    const note = doc.createElement("input");
    note.type = "text";
    note.placeholder = "note";
    note.dataset.note = question.qid;
    note.value = state.notes.get(question.qid) ?? "";
    note.addEventListener("input", () =>
      setNote(question.qid, note.value));
    row.append(note);
    form.append(row);
  }
  root.append(form, submitButton, status, summaryBox);

  const refreshSummary = async () => {
    const doc_ = await api.getDefectSummary([opts.promptId]);
    summaryBox.textContent = "";
    summaryBox.append(
      el("h3", undefined, `defect summary for ${opts.promptId}`));
    const grid = el("table", "summary-grid");
    const header = el("tr");
    const counts = el("tr");
    for (const qid of doc_.questions) {
      header.append(el("th", undefined, qid));
      const cell = el("td", undefined,
        String(doc_.summary[opts.promptId]?.[qid] ?? 0));
      cell.dataset.qid = qid;
      counts.append(cell);
    }
    grid.append(header, counts);
    summaryBox.append(grid);
  };

  const submit = async (): Promise<StoredDefectRecord[]> => {
    if (!sheetComplete()) {
      throw new Error("sheet is incomplete");
    }
    const records: DefectRecordPayload[] = checklist.map((q) => ({
      scenario_id: opts.scenarioId,
      prompt_id: opts.promptId,
      qid: q.qid,
      answer: state.answers.get(q.qid) as YesNo,
      inspector_id: opts.inspectorId,
      note: state.notes.get(q.qid) ?? "",
    }));
    const stored = await api.postDefects(records);
    const defects = stored.filter((r) => r.is_defect).length;
    status.textContent =
      `submitted ${stored.length} answers, ${defects} flagged as defects`;
    await refreshSummary();
    return stored;
  };
  submitButton.addEventListener("click", () => void submit());

  updateSubmit();
  await refreshSummary();
  return { root, setAnswer, setNote, sheetComplete, submit, refreshSummary };
}
