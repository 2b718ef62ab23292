/** In-progress span set for one (scenario, annotator), held client-side.
 *
 * Mirrors the server's span invariants before anything is sent: forward
 * ranges, token-aligned offsets, exact text slices, and no overlap between
 * two spans of the same component. Unsaved drafts never reach the server.
 */

import { snapToTokens, tokenize, type TokenSpan } from "./tokens.js";
import { componentLabel, type ComponentField, type SpanData } from "./types.js";

export type AddResult =
  | { ok: true; span: SpanData }
  | { ok: false; message: string };

export class AnnotationDraft {
  readonly spans: SpanData[] = [];
  private readonly tokens: TokenSpan[];

  constructor(
    readonly scenarioId: string,
    readonly annotatorId: string,
    private readonly text: string,
  ) {
    this.tokens = tokenize(text);
  }

  static fromStored(
    scenarioId: string,
    annotatorId: string,
    text: string,
    spans: SpanData[],
  ): AnnotationDraft {
    const draft = new AnnotationDraft(scenarioId, annotatorId, text);
    for (const span of spans) draft.spans.push({ ...span });
    draft.sort();
    return draft;
  }

  /** Document order, so list indices match the payload the server sees. */
  private sort(): void {
    this.spans.sort(
      (a, b) => a.start - b.start || a.component.localeCompare(b.component),
    );
  }

  /** Snap a range to token boundaries and add it, unless it collides. */
  add(start: number, end: number, component: ComponentField): AddResult {
    const snapped = snapToTokens(this.tokens, start, end);
    if (!snapped) {
      return { ok: false, message: "selection covers no text" };
    }
    const span: SpanData = {
      start: snapped.start,
      end: snapped.end,
      component,
      text: this.text.slice(snapped.start, snapped.end),
    };
    const clash = this.spans.find(
      (s) =>
        s.component === component && s.start < span.end && span.start < s.end,
    );
    if (clash) {
      return {
        ok: false,
        message:
          `${componentLabel(component)} spans must be disjoint; ` +
          `the selection overlaps "${clash.text}"`,
      };
    }
    this.spans.push(span);
    this.sort();
    return { ok: true, span };
  }

  removeAt(index: number): void {
    this.spans.splice(index, 1);
  }

  /** H9: goal spans should not cover step or data-practice spans. */
  h9Warnings(): string[] {
    const warnings: string[] = [];
    const goals = this.spans.filter((s) => s.component === "goal");
    const others = this.spans.filter(
      (s) => s.component === "steps" || s.component === "data_practices",
    );
    for (const goal of goals) {
      for (const other of others) {
        if (goal.start < other.end && other.start < goal.end) {
          warnings.push(
            `goal span "${goal.text}" overlaps ` +
              `${componentLabel(other.component)} span "${other.text}"`,
          );
        }
      }
    }
    return warnings;
  }

  /** Spans in document order, ready for PUT /api/annotations. */
  payload(): SpanData[] {
    return this.spans.map((s) => ({ ...s }));
  }
}
