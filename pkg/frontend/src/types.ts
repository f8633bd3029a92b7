/** Wire types for the /v1 service API. */

export interface VariableDoc {
  name: string;
  states: string[];
}

export interface EdgeDoc {
  parent: string;
  child: string;
}

export interface NetworkDocument {
  format_version: number;
  class_variable: string;
  variables: VariableDoc[];
  edges: EdgeDoc[];
  cpts?: unknown[];
}

export interface NetworkRecord {
  id: string;
  parent: string | null;
  document: NetworkDocument;
}

export interface NetworkListEntry {
  id: string;
  class_variable: string;
  variables: string[];
  edge_count: number;
  parent: string | null;
}

export interface ColumnSummary {
  name: string;
  states: string[];
}

export interface DatasetSummary {
  rows: number;
  class_column: string;
  columns: ColumnSummary[];
}

export type EditKind = "add" | "remove" | "reverse";

export interface EditRequest {
  kind: EditKind;
  a: string;
  b: string;
  direction?: "a_to_b" | "b_to_a";
}

export type JobState = "queued" | "running" | "done" | "failed";

export interface JobRecord {
  id: string;
  kind: "refine" | "evaluate" | "learn";
  state: JobState;
  progress: { done: number; total: number };
  error: string | null;
  request: Record<string, unknown>;
}

export interface PrPointDoc {
  threshold: number;
  precision: number | null;
  recall: number;
  tp: number;
  fp: number;
  fn: number;
  tn: number;
}

export interface LearnerDoc {
  name: string;
  fold_cci: number[];
  macro_cci: number;
  pr: PrPointDoc[];
}

export interface EditDoc {
  kind: EditKind;
  a: string;
  b: string;
  direction?: "a_to_b" | "b_to_a";
  sequence_index: number;
}

export interface RefineReport {
  kind: "refine";
  created_at: string;
  digest: string;
  config: Record<string, unknown>;
  original: { train_cci: number; test_cci: number };
  best: {
    train_cci: number;
    test_cci: number;
    edit_index: number | null;
    edit: EditDoc | null;
    network: NetworkDocument;
  };
  candidates: unknown[];
}

export interface EvalReport {
  kind: "evaluate";
  created_at: string;
  digest: string;
  folds: { k: number; seed: number; stratified: boolean };
  positive_state: string;
  cci_threshold: number;
  thresholds: number[];
  baseline_precision: number;
  learners: LearnerDoc[];
  pairwise_p: { a: string; b: string; p: number }[];
}

export type ReportDocument = RefineReport | EvalReport | Record<string, unknown>;

export interface CorrelationWarning {
  a: string;
  b: string;
  score: number;
}
