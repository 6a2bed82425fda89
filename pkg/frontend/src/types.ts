// Wire types mirroring the service schemas (GET /api/v1/schema).

export type TaskCode = "ASR" | "ER" | "LI" | "SE" | "SS" | "SV" | "VAD" | "FEAT";

export type SlotKind = "audio" | "text" | "labels" | "matrix" | "segments";

export interface InputBindingDoc {
  source?: number;
  step?: string;
  slot?: number;
}

export interface StepDoc {
  step_id: string;
  task: TaskCode;
  processor_id: string;
  params: Record<string, unknown>;
  inputs: InputBindingDoc[];
}

export interface PipelineDoc {
  schema_version: number;
  name: string;
  description: string;
  created_at: string;
  steps: StepDoc[];
}

export interface AudioEntry {
  audio_id: string;
  filename: string;
  sha256: string;
  duration_s: number;
  sample_rate: number;
  channels: number;
  clipped?: boolean;
}

export interface FeatureMatrixDoc {
  row_axis: "hz_linear" | "pitch_log" | "mel" | "chroma12" | "cepstral" | "scalar";
  row_labels: number[];
  frame_times: number[];
  data: number[][];
}

export interface FeatureInfo {
  name: string;
  params: Record<string, { type: string; default: unknown; choices?: unknown[] }>;
}

export interface OutputSlotDoc {
  kind: SlotKind;
  name: string;
}

export interface ModelDoc {
  id: string;
  task: TaskCode;
  input_arity: number;
  output_slots: OutputSlotDoc[];
  provenance: "builtin" | "external";
  required_sample_rate: number | null;
  metadata: Record<string, unknown>;
  timeout_s: number;
}

export interface JobDoc {
  job_id: string;
  kind: "step" | "pipeline_run" | "evaluation";
  state: "queued" | "running" | "done" | "failed";
  progress: { completed: number; total: number };
  result: Record<string, unknown> | null;
  error: string | null;
}

export interface StepOutputDoc {
  slot: string;
  kind: SlotKind;
  text?: string;
  labels?: { label: string; score: number }[];
  segments?: { start_s: number; end_s: number }[];
  artifact?: string;
  sample_rate?: number;
  duration_s?: number;
  rows?: number;
  frames?: number;
  row_axis?: string;
}

export interface StepResultDoc {
  step_id: string;
  task: TaskCode;
  processor_id: string;
  params: Record<string, unknown>;
  status: "done" | "failed" | "skipped";
  duration_ms: number;
  outputs: StepOutputDoc[];
  error: string | null;
  rating: number | null;
}

export interface RunReportDoc {
  run_id: string;
  created_at: string;
  engine_version: string;
  pipeline: PipelineDoc;
  inputs: { input_index: number; files: { name: string; sha256: string }[] }[];
  results: { input_index: number; input_name: string; steps: StepResultDoc[] }[];
}

export interface Violation {
  code: string;
  detail: string;
  step_id?: string;
}
