// Typed client for the capgate JSON API. The UI never computes metrics;
// everything rendered comes from these payloads.

export interface ScenarioParams {
  alpha: number;
  beta: number;
  gamma: number;
  capacity: number;
}

export interface DecisionBlock {
  tau_free: number;
  tau_capacity: number;
  tau_star: number;
  constraint_active: boolean;
  critical_capacity: number;
  loss_at_tau_star: number;
  residual_infeasible: boolean;
}

export interface MetricsBlock {
  recall: number;
  fpr: number;
  disparity: number;
  intervention_rate: number;
  loss: number;
  feasible: boolean;
}

export interface BaselineRow {
  policy: string;
  tau: number | string;
  recall: number;
  fpr: number;
  disparity: number;
  intervention_rate: number;
  loss: number;
  feasible: boolean;
}

export interface BaselineError {
  policy: string;
  error: string;
}

export type BaselineEntry = BaselineRow | BaselineError;

export function isBaselineError(entry: BaselineEntry): entry is BaselineError {
  return "error" in entry;
}

export interface LossCurveData {
  taus: number[];
  losses: number[];
  fnrs: number[];
  fprs: number[];
  deltas: number[];
  intervention_rates: number[];
}

export interface ScenarioResponse {
  dataset_id: string;
  params: ScenarioParams;
  decision: DecisionBlock;
  metrics: MetricsBlock;
  per_group_tpr: Record<string, number>;
  groups_excluded: string[];
  baselines: BaselineEntry[] | null;
  curve: LossCurveData | null;
}

export interface DatasetSummary {
  dataset_id: string;
  n: number;
  base_rate: number;
  groups: string[];
  n_validation: number;
  n_test: number;
}

export interface SweepRecordRow {
  dataset: string;
  scorer: string;
  alpha: number;
  beta: number;
  gamma: number;
  capacity: number;
  tau_free: number;
  tau_capacity: number;
  tau_star: number;
  constraint_active: boolean;
  recall: number;
  fpr: number;
  disparity: number;
  intervention_rate: number;
  loss: number;
  [bootstrapColumn: string]: number | string | boolean | null;
}

export interface SweepResponse {
  records: SweepRecordRow[];
  activation_rate: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(readonly baseUrl: string, fetchFn?: FetchLike) {
    // wrap to avoid Illegal-invocation when window.fetch loses its receiver
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path, init);
    if (!res.ok) {
      let detail = res.statusText;
      try {
        const body = await res.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(res.status, detail);
    }
    return (await res.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async health(): Promise<boolean> {
    try {
      const res = await this.fetchFn(this.baseUrl + "/health");
      return res.ok;
    } catch {
      return false;
    }
  }

  listDatasets(): Promise<DatasetSummary[]> {
    return this.request<DatasetSummary[]>("/api/datasets");
  }

  evaluate(
    datasetId: string,
    params: ScenarioParams,
    opts: { baselines?: boolean; curve?: boolean } = {},
  ): Promise<ScenarioResponse> {
    return this.post<ScenarioResponse>("/api/evaluate", {
      dataset_id: datasetId,
      alpha: params.alpha,
      beta: params.beta,
      gamma: params.gamma,
      capacity: params.capacity,
      include_baselines: opts.baselines ?? false,
      include_curve: opts.curve ?? false,
    });
  }

  /** Single-weight-cell sweep across a short capacity ladder (<= 20 points). */
  async capacityLine(
    datasetId: string,
    params: ScenarioParams,
    capacities: number[],
  ): Promise<SweepRecordRow[]> {
    if (capacities.length === 0 || capacities.length > 20) {
      throw new Error(`capacity ladder must have 1..20 points, got ${capacities.length}`);
    }
    const body = await this.post<SweepResponse>("/api/sweep", {
      dataset_id: datasetId,
      alphas: [params.alpha],
      betas: [params.beta],
      gammas: [params.gamma],
      capacities,
    });
    return body.records;
  }
}
