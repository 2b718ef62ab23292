/** Span labeling view: click tokens to select a range, label, save. */

import type { ApiClient } from "./api.js";
import { ApiError } from "./api.js";
import { AnnotationDraft, type AddResult } from "./draft.js";
import { tokenize, type TokenSpan } from "./tokens.js";
import {
  COMPONENTS,
  componentLabel,
  type ComponentField,
  type Scenario,
} from "./types.js";

export interface AnnotateView {
  root: HTMLElement;
  draft: AnnotationDraft;
  /** Label the currently selected token range. Same as the buttons. */
  labelSelection(component: ComponentField): AddResult;
  save(): Promise<boolean>;
  refresh(): void;
}

export async function renderAnnotateView(
  root: HTMLElement,
  api: ApiClient,
  scenarioId: string,
  annotatorId: string,
): Promise<AnnotateView> {
  const doc = root.ownerDocument;
  const scenario: Scenario = await api.getScenario(scenarioId);
  const stored = await api.getAnnotation(scenarioId, annotatorId);
  const draft = stored
    ? AnnotationDraft.fromStored(
        scenarioId, annotatorId, scenario.text, stored.spans)
    : new AnnotationDraft(scenarioId, annotatorId, scenario.text);
  const tokens = tokenize(scenario.text);

  // Selection is a contiguous token range: first click anchors it, the
  // next click extends it, a click after that starts over.
  let anchor: number | null = null;
  let focus: number | null = null;
  let selectionDone = false;
  let errorSpanIndex: number | null = null;

  const el = (tag: string, cls?: string, text?: string): HTMLElement => {
    const node = doc.createElement(tag);
    if (cls) node.className = cls;
    if (text !== undefined) node.textContent = text;
    return node;
  };

  root.textContent = "";
  root.className = "annotate-view";

  const header = el("div", "view-header");
  header.append(
    el("h2", undefined, `${scenario.app_name}: ${scenario.screen_title}`),
    el("p", "meta",
      `${scenario.id} / ${scenario.category} / ${scenario.platform}, ` +
      `annotating as ${annotatorId}`),
  );

  const banner = el("div", "banner hidden");
  const textBox = el("div", "scenario-text");
  const labelBar = el("div", "label-bar");
  const spanList = el("ul", "span-list");
  const saveButton = el("button", "save-button", "Save") as HTMLButtonElement;
  const status = el("p", "status");
  root.append(header, banner, textBox, labelBar, spanList, saveButton, status);

  const setBanner = (kind: "" | "error" | "warning", text: string) => {
    banner.className = kind ? `banner ${kind}` : "banner hidden";
    banner.textContent = text;
  };

  const selectedRange = (): { a: number; b: number } | null => {
    if (anchor === null) return null;
    const f = focus ?? anchor;
    return { a: Math.min(anchor, f), b: Math.max(anchor, f) };
  };

  const onTokenClick = (index: number) => {
    if (anchor === null || selectionDone) {
      anchor = index;
      focus = null;
      selectionDone = false;
    } else {
      focus = index;
      selectionDone = true;
    }
    refresh();
  };

  const tokenCovering = (t: TokenSpan, s: { start: number; end: number }) =>
    s.start < t.end && t.start < s.end;

  const refresh = () => {
    textBox.textContent = "";
    const sel = selectedRange();
    let cursor = 0;
    tokens.forEach((token, i) => {
      if (token.start > cursor) {
        textBox.append(
          doc.createTextNode(scenario.text.slice(cursor, token.start)));
      }
      const tok = el("span", "tok", token.text);
      tok.dataset.index = String(i);
      if (sel && i >= sel.a && i <= sel.b) tok.classList.add("sel");
      for (const span of draft.spans) {
        if (tokenCovering(token, span)) {
          tok.classList.add(`comp-${span.component}`);
        }
      }
      tok.addEventListener("click", () => onTokenClick(i));
      textBox.append(tok);
      cursor = token.end;
    });

    spanList.textContent = "";
    draft.spans.forEach((span, i) => {
      const item = el("li", `span-item comp-${span.component}`);
      if (i === errorSpanIndex) item.classList.add("error");
      item.append(
        el("span", "span-label", componentLabel(span.component)),
        el("span", "span-text", ` "${span.text}" `),
        el("span", "span-offsets", `[${span.start}, ${span.end})`),
      );
      const remove = el("button", "remove-button", "remove");
      remove.addEventListener("click", () => {
        draft.removeAt(i);
        errorSpanIndex = null;
        updateWarnings();
        refresh();
      });
      item.append(remove);
      spanList.append(item);
    });
  };

  const updateWarnings = () => {
    const warnings = draft.h9Warnings();
    if (warnings.length) {
      setBanner("warning", `H9: ${warnings.join("; ")}`);
    } else {
      setBanner("", "");
    }
  };

  const labelSelection = (component: ComponentField): AddResult => {
    const sel = selectedRange();
    if (!sel) {
      const result: AddResult = { ok: false, message: "select tokens first" };
      setBanner("error", result.message);
      return result;
    }
    const result = draft.add(
      tokens[sel.a].start, tokens[sel.b].end, component);
    if (!result.ok) {
      setBanner("error", result.message);
      return result;
    }
    anchor = null;
    focus = null;
    selectionDone = false;
    errorSpanIndex = null;
    updateWarnings();
    refresh();
    return result;
  };

  for (const info of COMPONENTS) {
    const button = el(
      "button", `label-button comp-${info.field}`, info.label);
    button.dataset.component = info.field;
    button.addEventListener("click", () => labelSelection(info.field));
    labelBar.append(button);
  }

  const save = async (): Promise<boolean> => {
    try {
      const storedDoc = await api.putAnnotation(
        scenarioId, annotatorId, draft.payload());
      errorSpanIndex = null;
      status.textContent =
        `saved ${storedDoc.spans.length} span(s) at ${storedDoc.updated_at}` +
        (storedDoc.lints.length
          ? `, lints: ${storedDoc.lints.map((l) => l.code).join(", ")}`
          : "");
      updateWarnings();
      refresh();
      return true;
    } catch (err) {
      if (err instanceof ApiError) {
        // highlight the span the server named, if it named one
        const m = /span (\d+)/.exec(err.message);
        errorSpanIndex = m ? Number(m[1]) : null;
        setBanner("error", err.message);
        refresh();
        return false;
      }
      throw err;
    }
  };
  saveButton.addEventListener("click", () => void save());

  updateWarnings();
  refresh();
  return { root, draft, labelSelection, save, refresh };
}
