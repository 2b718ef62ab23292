import { describe, expect, it } from "vitest";

import { AnnotationDraft } from "../src/draft.js";
import type { SpanData } from "../src/types.js";

// Token offsets: As [0,2)  a [3,4)  shopper [5,12)  I [13,14)  want [15,19)
// to [20,22)  view [23,27)  my [28,30)  past [31,35)  orders [36,42)
// quickly [43,50)
const TEXT = "As a shopper I want to view my past orders quickly";

function draft(): AnnotationDraft {
  return new AnnotationDraft("s01", "w1", TEXT);
}

describe("AnnotationDraft.add", () => {
  it("records a token-aligned span with its exact text", () => {
    const d = draft();
    const result = d.add(5, 12, "user");
    expect(result.ok).toBe(true);
    expect(d.spans).toEqual([
      { start: 5, end: 12, component: "user", text: "shopper" },
    ]);
  });

  it("snaps partial selections outward to whole tokens", () => {
    const d = draft();
    const result = d.add(7, 10, "user");
    expect(result).toEqual({
      ok: true,
      span: { start: 5, end: 12, component: "user", text: "shopper" },
    });
  });

  it("rejects selections that touch no token", () => {
    const d = draft();
    const result = d.add(4, 5, "user");
    expect(result).toEqual({ ok: false, message: "selection covers no text" });
    expect(d.spans).toHaveLength(0);
  });

  it("refuses overlapping spans of the same component", () => {
    const d = draft();
    expect(d.add(23, 36, "goal").ok).toBe(true);
    const result = d.add(31, 42, "goal");
    expect(result.ok).toBe(false);
    if (!result.ok) {
      expect(result.message).toContain("UC-Goal spans must be disjoint");
      expect(result.message).toContain('"view my past"');
    }
    expect(d.spans).toHaveLength(1);
  });

  it("allows overlapping spans of different components", () => {
    const d = draft();
    expect(d.add(23, 36, "goal").ok).toBe(true);
    expect(d.add(31, 42, "steps").ok).toBe(true);
    expect(d.spans).toHaveLength(2);
  });

  it("keeps spans in document order as they are added", () => {
    const d = draft();
    d.add(43, 51, "steps");
    d.add(0, 4, "user");
    d.add(23, 27, "goal");
    expect(d.spans.map((s) => s.text)).toEqual(["As a", "view", "quickly"]);
  });
});

describe("AnnotationDraft.fromStored", () => {
  it("copies and sorts stored spans", () => {
    const stored: SpanData[] = [
      { start: 31, end: 42, component: "steps", text: "past orders" },
      { start: 0, end: 4, component: "user", text: "As a" },
    ];
    const d = AnnotationDraft.fromStored("s01", "w1", TEXT, stored);
    expect(d.spans.map((s) => s.start)).toEqual([0, 31]);
    d.spans[0]!.text = "mutated";
    expect(stored[1]!.text).toBe("As a");
  });
});

describe("AnnotationDraft.h9Warnings", () => {
  it("flags goal spans overlapping steps or data practices", () => {
    const d = draft();
    d.add(23, 42, "goal");
    d.add(31, 42, "steps");
    d.add(14, 18, "data_practices");
    const warnings = d.h9Warnings();
    expect(warnings).toHaveLength(1);
    expect(warnings[0]).toContain("goal span");
    expect(warnings[0]).toContain("UC-Steps span");
  });

  it("is silent when goal spans stay clear", () => {
    const d = draft();
    d.add(23, 27, "goal");
    d.add(43, 51, "steps");
    expect(d.h9Warnings()).toEqual([]);
  });
});

describe("AnnotationDraft.removeAt and payload", () => {
  it("removes by list index and deep-copies the payload", () => {
    const d = draft();
    d.add(0, 4, "user");
    d.add(23, 27, "goal");
    d.removeAt(0);
    expect(d.spans.map((s) => s.text)).toEqual(["view"]);
    const payload = d.payload();
    payload[0]!.text = "mutated";
    expect(d.spans[0]!.text).toBe("view");
  });
});
