// Typed client for the service REST API. Every capability lives server-side;
// this file only shapes requests and surfaces error payloads verbatim.

import type {
  AudioEntry,
  FeatureInfo,
  FeatureMatrixDoc,
  JobDoc,
  ModelDoc,
  PipelineDoc,
  RunReportDoc,
  TaskCode,
  Violation,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  violations: Violation[];

  constructor(status: number, message: string, violations: Violation[] = []) {
    super(message);
    this.status = status;
    this.violations = violations;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private base: string;
  private fetcher: FetchLike;
  private token: string | null;

  constructor(baseUrl: string, fetcher?: FetchLike, token: string | null = null) {
    this.base = baseUrl.replace(/\/+$/, "") + "/api/v1";
    this.fetcher = fetcher ?? ((input, init) => fetch(input, init));
    this.token = token;
  }

  private headers(extra: Record<string, string> = {}): Record<string, string> {
    return this.token ? { ...extra, Authorization: `Bearer ${this.token}` } : extra;
  }

  private async handle<T>(res: Response, parse: "json" | "bytes" | "text" = "json"): Promise<T> {
    if (!res.ok) {
      let detail = `${res.status}`;
      let violations: Violation[] = [];
      try {
        const body = await res.json();
        violations = body.violations ?? [];
        detail = body.detail ?? (violations.length ? violationSummary(violations) : detail);
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(res.status, detail, violations);
    }
    if (parse === "bytes") {
      return new Uint8Array(await res.arrayBuffer()) as unknown as T;
    }
    if (parse === "text") {
      return (await res.text()) as unknown as T;
    }
    return (await res.json()) as T;
  }

  // --- audio ---

  async uploadAudio(filename: string, bytes: Uint8Array | Blob): Promise<AudioEntry> {
    const form = new FormData();
    const blob = bytes instanceof Blob ? bytes : new Blob([bytes as BlobPart], { type: "audio/wav" });
    form.append("file", blob, filename);
    const res = await this.fetcher(`${this.base}/audio`, {
      method: "POST",
      body: form,
      headers: this.headers(),
    });
    return this.handle<AudioEntry>(res);
  }

  async listAudio(): Promise<AudioEntry[]> {
    const res = await this.fetcher(`${this.base}/audio`, { headers: this.headers() });
    return (await this.handle<{ items: AudioEntry[] }>(res)).items;
  }

  audioUrl(audioId: string): string {
    return `${this.base}/audio/${audioId}`;
  }

  // --- features ---

  async listFeatures(): Promise<FeatureInfo[]> {
    const res = await this.fetcher(`${this.base}/features`, { headers: this.headers() });
    return (await this.handle<{ features: FeatureInfo[] }>(res)).features;
  }

  async computeFeature(
    audioId: string,
    name: string,
    params: Record<string, unknown>,
  ): Promise<FeatureMatrixDoc> {
    const res = await this.fetcher(`${this.base}/audio/${audioId}/features/${name}`, {
      method: "POST",
      headers: this.headers({ "Content-Type": "application/json" }),
      body: JSON.stringify(params),
    });
    return this.handle<FeatureMatrixDoc>(res);
  }

  // --- registry ---

  async listTasks(): Promise<{ code: TaskCode; name: string }[]> {
    const res = await this.fetcher(`${this.base}/tasks`, { headers: this.headers() });
    return (await this.handle<{ tasks: { code: TaskCode; name: string }[] }>(res)).tasks;
  }

  async listModels(task: TaskCode): Promise<ModelDoc[]> {
    const res = await this.fetcher(`${this.base}/tasks/${task}/models`, {
      headers: this.headers(),
    });
    return (await this.handle<{ models: ModelDoc[] }>(res)).models;
  }

  // --- pipelines ---

  async createPipeline(doc: PipelineDoc): Promise<string> {
    const res = await this.fetcher(`${this.base}/pipelines`, {
      method: "POST",
      headers: this.headers({ "Content-Type": "application/json" }),
      body: JSON.stringify(doc),
    });
    return (await this.handle<{ pipeline_id: string }>(res)).pipeline_id;
  }

  async listPipelines(): Promise<{ pipeline_id: string; name: string; steps: number }[]> {
    const res = await this.fetcher(`${this.base}/pipelines`, { headers: this.headers() });
    return (await this.handle<{ items: { pipeline_id: string; name: string; steps: number }[] }>(res)).items;
  }

  /** Canonical stored bytes -- byte-comparable with a local draft export. */
  async getPipelineBytes(pipelineId: string): Promise<Uint8Array> {
    const res = await this.fetcher(`${this.base}/pipelines/${pipelineId}`, {
      headers: this.headers(),
    });
    return this.handle<Uint8Array>(res, "bytes");
  }

  async getPipeline(pipelineId: string): Promise<PipelineDoc> {
    const bytes = await this.getPipelineBytes(pipelineId);
    return JSON.parse(new TextDecoder().decode(bytes)) as PipelineDoc;
  }

  async deletePipeline(pipelineId: string): Promise<void> {
    const res = await this.fetcher(`${this.base}/pipelines/${pipelineId}`, {
      method: "DELETE",
      headers: this.headers(),
    });
    await this.handle(res);
  }

  // --- execution ---

  async runStep(stepSpec: unknown, audioIds: string[]): Promise<JobDoc> {
    const res = await this.fetcher(`${this.base}/steps/run`, {
      method: "POST",
      headers: this.headers({ "Content-Type": "application/json" }),
      body: JSON.stringify({ step_spec: stepSpec, audio_ids: audioIds }),
    });
    return this.handle<JobDoc>(res);
  }

  async runPipeline(pipelineId: string, audioIds: string[]): Promise<JobDoc> {
    const res = await this.fetcher(`${this.base}/pipelines/${pipelineId}/run`, {
      method: "POST",
      headers: this.headers({ "Content-Type": "application/json" }),
      body: JSON.stringify({ audio_ids: audioIds }),
    });
    return this.handle<JobDoc>(res);
  }

  async getJob(jobId: string): Promise<JobDoc> {
    const res = await this.fetcher(`${this.base}/jobs/${jobId}`, { headers: this.headers() });
    return this.handle<JobDoc>(res);
  }

  /** Poll a job to a terminal state. */
  async waitJob(jobId: string, pollMs = 250, timeoutMs = 600_000): Promise<JobDoc> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const job = await this.getJob(jobId);
      if (job.state === "done" || job.state === "failed") {
        return job;
      }
      if (Date.now() > deadline) {
        throw new ApiError(0, `job ${jobId} did not finish within ${timeoutMs} ms`);
      }
      await new Promise((resolve) => setTimeout(resolve, pollMs));
    }
  }

  // --- reports & ratings ---

  async getReport(runId: string): Promise<RunReportDoc> {
    const res = await this.fetcher(`${this.base}/runs/${runId}/report?format=json`, {
      headers: this.headers(),
    });
    return this.handle<RunReportDoc>(res);
  }

  async getReportMarkdown(runId: string): Promise<string> {
    const res = await this.fetcher(`${this.base}/runs/${runId}/report?format=markdown`, {
      headers: this.headers(),
    });
    return this.handle<string>(res, "text");
  }

  async rateStep(runId: string, inputIndex: number, stepId: string, rating: number): Promise<void> {
    const res = await this.fetcher(`${this.base}/runs/${runId}/ratings`, {
      method: "POST",
      headers: this.headers({ "Content-Type": "application/json" }),
      body: JSON.stringify({ input_index: inputIndex, step_id: stepId, rating }),
    });
    await this.handle(res);
  }

  // --- evaluation ---

  async evaluate(body: {
    metrics: string[];
    pairs?: Record<string, string>[];
    manifest_csv?: string;
  }): Promise<JobDoc> {
    const res = await this.fetcher(`${this.base}/evaluate`, {
      method: "POST",
      headers: this.headers({ "Content-Type": "application/json" }),
      body: JSON.stringify(body),
    });
    return this.handle<JobDoc>(res);
  }
}

export function violationSummary(violations: Violation[]): string {
  return violations.map((v) => `${v.code}: ${v.detail}`).join("; ");
}
