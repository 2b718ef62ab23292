/** Thin fetch client for the uccx service; the only way the UI touches state. */

import type {
  ChecklistQuestion,
  DefectRecordPayload,
  DefectSummary,
  KappaReport,
  Prediction,
  Scenario,
  ScenarioSummary,
  SpanData,
  StoredAnnotation,
  StoredDefectRecord,
} from "./types.js";

export class ApiError extends Error {
  constructor(public readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

export class ApiClient {
  private readonly fetchFn: typeof fetch;

  constructor(private readonly base = "", fetchFn?: typeof fetch) {
    this.fetchFn = fetchFn ?? globalThis.fetch.bind(globalThis);
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.base + path, init);
    if (!resp.ok) {
      let detail = `HTTP ${resp.status}`;
      try {
        const body = (await resp.json()) as { detail?: unknown };
        if (typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body, keep the status line
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  listScenarios(): Promise<ScenarioSummary[]> {
    return this.request("/api/scenarios");
  }

  getScenario(id: string): Promise<Scenario> {
    return this.request(`/api/scenarios/${encodeURIComponent(id)}`);
  }

  /** Resolves null when the annotator has nothing stored yet. */
  async getAnnotation(
    scenarioId: string,
    annotatorId: string,
  ): Promise<StoredAnnotation | null> {
    try {
      return await this.request(
        `/api/annotations/${encodeURIComponent(scenarioId)}/` +
          encodeURIComponent(annotatorId),
      );
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) return null;
      throw err;
    }
  }

  putAnnotation(
    scenarioId: string,
    annotatorId: string,
    spans: SpanData[],
  ): Promise<StoredAnnotation> {
    return this.request(
      `/api/annotations/${encodeURIComponent(scenarioId)}/` +
        encodeURIComponent(annotatorId),
      {
        method: "PUT",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ spans }),
      },
    );
  }

  getKappa(component?: string): Promise<KappaReport> {
    const query = component
      ? `?component=${encodeURIComponent(component)}`
      : "";
    return this.request(`/api/kappa${query}`);
  }

  getPrediction(runId: string, scenarioId: string): Promise<Prediction> {
    return this.request(
      `/api/predictions/${encodeURIComponent(runId)}/` +
        encodeURIComponent(scenarioId),
    );
  }

  getChecklist(): Promise<ChecklistQuestion[]> {
    return this.request("/api/checklist");
  }

  postDefects(
    records: DefectRecordPayload[],
  ): Promise<StoredDefectRecord[]> {
    return this.request("/api/defects", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(records),
    });
  }

  getDefectSummary(prompts?: string[]): Promise<DefectSummary> {
    const query = prompts && prompts.length
      ? `?runs=${encodeURIComponent(prompts.join(","))}`
      : "";
    return this.request(`/api/summary/defects${query}`);
  }
}
