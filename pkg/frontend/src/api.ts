/**
 * Typed client for the analysis service. Every number shown in the UI comes
 * from these responses; the client computes nothing itself.
 */

export type Strategy = "S1" | "S2" | "S3";
export type Verdict = "verified" | "contradicted" | "unverifiable";

export interface DatasetInfo {
  dataset_id: string;
  name: string;
  row_count: number;
  columns: { name: string; kind: "numerical" | "categorical" }[];
  label: string | null;
  domain_description: string;
}

export interface EmbeddingJobStatus {
  job_id: string;
  status: "running" | "complete" | "failed";
  epoch: number;
  n_epochs: number;
  complete: boolean;
  coords: [number, number][] | null;
  error: string | null;
}

export interface SelectionInfo {
  mask_id: string;
  dataset_id: string;
  selected_count: number;
  rest_count: number;
  selected: boolean[];
  source: Record<string, unknown>;
}

export interface ClaimVerdictInfo {
  feature: string;
  matched: boolean;
  values: number[];
  claim_kind: string;
  span: [number, number];
  text: string;
  verdict: Verdict;
  expected: string;
}

export interface ValidationInfo {
  claims: ClaimVerdictInfo[];
  verified: number;
  contradicted: number;
  unverifiable: number;
  mention_precision: number;
  mention_recall: number;
  mentioned: string[];
  top_features: string[];
  hallucinated_features: string[];
  format_ok: boolean;
  word_count: number;
  bullet_count: number;
}

export interface ExplanationRecord {
  id: string;
  raw_text: string;
  model: string;
  strategy: Strategy;
  trial_index: number;
  mask_id: string;
  validation: ValidationInfo;
}

export interface ProfileInfo {
  dataset_id: string;
  mask_id: string;
  selected_count: number;
  rest_count: number;
  ranking: string[];
  summaries: Record<string, unknown>[];
  text: string;
}

export interface DistributionInfo {
  feature: string;
  kind: "numerical" | "categorical";
  selected_counts: number[];
  rest_counts: number[];
  bin_edges: number[] | null;
  categories: string[] | null;
  selected_missing: number;
  rest_missing: number;
}

export interface BudgetReport {
  ok: boolean;
  estimated_tokens: number;
  budget: number;
  strategy: Strategy;
}

export class ApiError extends Error {
  readonly code: string;
  readonly detail: Record<string, unknown>;
  readonly status: number;

  constructor(status: number, code: string, message: string, detail?: Record<string, unknown>) {
    super(message);
    this.status = status;
    this.code = code;
    this.detail = detail ?? {};
  }

  get budgetReport(): BudgetReport | null {
    if (this.code !== "budget_exceeded") return null;
    return this.detail as unknown as BudgetReport;
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let code = "http_error";
      let message = `HTTP ${response.status}`;
      let detail: Record<string, unknown> | undefined;
      try {
        const body = await response.json();
        code = body.code ?? code;
        message = body.message ?? message;
        detail = body.detail;
      } catch {
        // non-JSON error body; keep the generic message
      }
      throw new ApiError(response.status, code, message, detail);
    }
    return (await response.json()) as T;
  }

  async uploadDataset(data: File, context: File): Promise<DatasetInfo> {
    const form = new FormData();
    form.append("data", data);
    form.append("context", context);
    return this.request("/datasets", { method: "POST", body: form });
  }

  async startEmbedding(
    datasetId: string,
    params: { n_neighbors?: number; n_epochs?: number; seed?: number; snapshot_interval?: number },
  ): Promise<{ job_id: string }> {
    return this.request(`/datasets/${datasetId}/embedding`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(params),
    });
  }

  async embeddingStatus(jobId: string): Promise<EmbeddingJobStatus> {
    return this.request(`/embeddings/${jobId}`);
  }

  async selectPolygon(
    datasetId: string,
    polygon: [number, number][],
    jobId: string,
  ): Promise<SelectionInfo> {
    return this.request(`/datasets/${datasetId}/selections`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ polygon, job_id: jobId }),
    });
  }

  async selectPredicate(
    datasetId: string,
    column: string,
    value: string,
  ): Promise<SelectionInfo> {
    return this.request(`/datasets/${datasetId}/selections`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ predicate: { column, value } }),
    });
  }

  async profile(maskId: string): Promise<ProfileInfo> {
    return this.request(`/selections/${maskId}/profile`);
  }

  async distribution(
    maskId: string,
    feature: string,
    bins = 20,
  ): Promise<DistributionInfo> {
    return this.request(
      `/selections/${maskId}/distribution/${encodeURIComponent(feature)}?bins=${bins}`,
    );
  }

  async requestExplanations(
    maskId: string,
    options: { strategy: Strategy; trials: number; use_mock: boolean; seed?: number },
  ): Promise<{ explanation_ids: string[] }> {
    return this.request(`/selections/${maskId}/explanations`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(options),
    });
  }

  async explanation(id: string): Promise<ExplanationRecord> {
    return this.request(`/explanations/${id}`);
  }

  async consistency(
    maskId: string,
    strategy: Strategy,
  ): Promise<{ jaccard: number; all_values_consistent: boolean }> {
    return this.request(`/selections/${maskId}/trials/${strategy}/consistency`);
  }
}
