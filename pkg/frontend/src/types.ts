/** JSON shapes of the uccx HTTP API, mirrored field for field. */

export type ComponentField =
  | "name"
  | "goal"
  | "user"
  | "system"
  | "external_entities"
  | "data_practices"
  | "steps";

export interface ComponentInfo {
  field: ComponentField;
  label: string;
}

/** The seven components in canonical order. */
export const COMPONENTS: readonly ComponentInfo[] = [
  { field: "name", label: "UC-Name" },
  { field: "goal", label: "UC-Goal" },
  { field: "user", label: "UC-User" },
  { field: "system", label: "UC-System" },
  { field: "external_entities", label: "UC-ET" },
  { field: "data_practices", label: "UC-DPs" },
  { field: "steps", label: "UC-Steps" },
];

export function componentLabel(field: string): string {
  const info = COMPONENTS.find((c) => c.field === field);
  return info ? info.label : field;
}

export interface ScenarioSummary {
  id: string;
  app_name: string;
  platform: string;
  category: string;
  screen_title: string;
}

export interface Scenario extends ScenarioSummary {
  store_url: string;
  text: string;
  author_declared_info_types: string[];
}

export interface SpanData {
  start: number;
  end: number;
  component: ComponentField;
  text: string;
}

export interface LintData {
  code: string;
  annotator_id: string;
  detail: string;
}

export interface StoredAnnotation {
  scenario_id: string;
  annotator_id: string;
  spans: SpanData[];
  lints: LintData[];
  updated_at: string;
}

export interface KappaEntry {
  kappa: number | null;
  band?: string;
  reason?: string;
}

export interface KappaReport {
  components: Record<string, KappaEntry>;
  scenario_count: number;
  annotator_count: number | null;
  reason?: string;
}

export interface ChecklistQuestion {
  qid: string;
  text: string;
  polarity: "defect_if_yes" | "defect_if_no";
}

export type YesNo = "yes" | "no";

export interface DefectRecordPayload {
  scenario_id: string;
  prompt_id: string;
  qid: string;
  answer: YesNo;
  inspector_id: string;
  note?: string;
}

export interface StoredDefectRecord extends DefectRecordPayload {
  note: string;
  is_defect: boolean;
}

export interface DefectSummary {
  summary: Record<string, Record<string, number>>;
  questions: string[];
}

export interface Prediction {
  scenario_id: string;
  components: Record<string, string[]>;
  warnings: { kind: string; detail: string }[];
}
