// Pipeline draft: what the Pipelines page edits. Mirrors the wire pipeline
// document plus per-step UI state (previews, collapse, error banners);
// serializing drops the UI state. All validation stays on the server -- the
// draft only carries the violations back for inline display.

import { canonicalJson } from "./canonical.js";
import type { InputBindingDoc, PipelineDoc, StepDoc, TaskCode, Violation } from "./types.js";

export interface StepUiState {
  collapsed: boolean;
  lastResultPreview: unknown | null;
  errorBanners: string[];
}

export interface DraftStep {
  doc: StepDoc;
  ui: StepUiState;
}

export class PipelineDraft {
  name: string;
  description: string;
  createdAt: string;
  steps: DraftStep[] = [];
  violations: Violation[] = [];

  constructor(name: string, createdAt?: string, description = "") {
    this.name = name;
    this.description = description;
    this.createdAt = createdAt ?? new Date().toISOString().replace(/\.\d{3}Z$/, "+00:00");
  }

  addStep(step: {
    task: TaskCode;
    processorId: string;
    inputs: InputBindingDoc[];
    params?: Record<string, unknown>;
    stepId?: string;
  }): DraftStep {
    const doc: StepDoc = {
      step_id: step.stepId ?? `s${this.steps.length + 1}`,
      task: step.task,
      processor_id: step.processorId,
      params: step.params ?? {},
      inputs: step.inputs.map(normalizeBinding),
    };
    const draft: DraftStep = {
      doc,
      ui: { collapsed: false, lastResultPreview: null, errorBanners: [] },
    };
    this.steps.push(draft);
    return draft;
  }

  removeStep(stepId: string): void {
    this.steps = this.steps.filter((s) => s.doc.step_id !== stepId);
  }

  step(stepId: string): DraftStep | undefined {
    return this.steps.find((s) => s.doc.step_id === stepId);
  }

  /** Wire document: UI state dropped. */
  toDoc(): PipelineDoc {
    return {
      schema_version: 1,
      name: this.name,
      description: this.description,
      created_at: this.createdAt,
      steps: this.steps.map((s) => ({
        step_id: s.doc.step_id,
        task: s.doc.task,
        processor_id: s.doc.processor_id,
        params: { ...s.doc.params },
        inputs: s.doc.inputs.map(normalizeBinding),
      })),
    };
  }

  /** Canonical .dap.json text (matches the backend's export bytes). */
  serialize(): string {
    return canonicalJson(this.toDoc());
  }

  static fromDoc(doc: PipelineDoc): PipelineDraft {
    const draft = new PipelineDraft(doc.name, doc.created_at, doc.description);
    for (const step of doc.steps) {
      draft.addStep({
        task: step.task,
        processorId: step.processor_id,
        params: step.params,
        inputs: step.inputs,
        stepId: step.step_id,
      });
    }
    return draft;
  }
}

function normalizeBinding(binding: InputBindingDoc): InputBindingDoc {
  if (binding.source !== undefined && binding.source !== null) {
    return { source: binding.source };
  }
  if (binding.step === undefined || binding.step === null) {
    throw new Error("binding must set source or step");
  }
  return { step: binding.step, slot: binding.slot ?? 0 };
}
