import { PipelineDraft } from "../src/draft.js";

/** Build the multi-speaker pipeline the way the Pipelines page does:
 * one separation step, three VAD branches, LI+ASR per branch. */
export function buildSeparationDraft(createdAt: string): PipelineDraft {
  const draft = new PipelineDraft("multi-speaker-multi-language-asr", createdAt);
  draft.addStep({
    task: "SS", processorId: "sep-bands-3", stepId: "sep",
    inputs: [{ source: 0 }],
  });
  for (let i = 0; i < 3; i++) {
    draft.addStep({
      task: "VAD", processorId: "vad-energy", stepId: `vad${i}`,
      inputs: [{ step: "sep", slot: i }],
    });
  }
  for (let i = 0; i < 3; i++) {
    draft.addStep({
      task: "LI", processorId: "li-fixed", stepId: `li${i}`,
      inputs: [{ step: `vad${i}`, slot: 1 }],
    });
    draft.addStep({
      task: "ASR", processorId: "asr-fixed", stepId: `asr${i}`,
      inputs: [{ step: `vad${i}`, slot: 1 }],
    });
  }
  return draft;
}
