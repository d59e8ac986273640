/**
 * Typed client for the local planning service.
 *
 * Every statistic the UI displays comes through this client; a request log
 * records each call so tests can assert that no number was computed
 * locally.
 */

export type DesignId = "mean" | "two-sample" | "paired" | "two-by-two" | "regression";

export interface MeanPlanRequest {
  sigma2?: number;
  rho2?: number;
  mse?: number;
  p?: number;
  se?: number;
  sp?: number;
  N: number;
  delta: number;
  alpha: number;
  power: number;
  method?: "classical" | "vanilla" | "optimal";
}

export interface TwoSamplePlanRequest extends MeanPlanRequest {
  allocation?: number;
}

export interface TwoByTwoPlanRequest {
  p0: number;
  p1: number;
  rho0?: number;
  rho1?: number;
  se?: number;
  sp?: number;
  kappa?: number;
  measure: "RR" | "OR";
  alpha: number;
  power: number;
}

export interface RegressionPlanRequest {
  v_yy: number;
  v_ff: number;
  v_yf: number;
  N: number;
  delta: number;
  alpha: number;
  power: number;
}

export type PlanRequest =
  | MeanPlanRequest
  | TwoSamplePlanRequest
  | TwoByTwoPlanRequest
  | RegressionPlanRequest;

export interface PlanResponse {
  design: string;
  method?: string;
  inputs: Record<string, number | boolean>;
  n_star?: number;
  n_star_b?: number;
  n0?: number;
  n1?: number;
  classical_n?: number;
  classical_n0?: number;
  reduction: number;
  analytic_power_at_n: number;
  lambda_star?: number;
  pool_exhausted?: boolean;
  rule_of_thumb_ratio?: number;
  curve: [number, number][];
}

export interface ServiceError {
  status: number;
  code: string;
  message: string;
  minN?: number;
  fields?: { field: string; message: string }[];
}

export interface LogEntry {
  endpoint: string;
  body: PlanRequest;
  status: number;
}

export class PlanServiceClient {
  readonly requestLog: LogEntry[] = [];

  constructor(
    private baseUrl: string = "",
    private fetchFn: typeof fetch = fetch,
  ) {}

  async plan(design: DesignId, body: PlanRequest): Promise<PlanResponse> {
    const endpoint = `/v1/plan/${design}`;
    const resp = await this.fetchFn(this.baseUrl + endpoint, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    this.requestLog.push({ endpoint, body, status: resp.status });
    if (!resp.ok) {
      throw await toServiceError(resp);
    }
    return (await resp.json()) as PlanResponse;
  }

  async healthz(): Promise<boolean> {
    try {
      const resp = await this.fetchFn(this.baseUrl + "/v1/healthz");
      return resp.ok;
    } catch {
      return false;
    }
  }
}

async function toServiceError(resp: Response): Promise<ServiceError> {
  let code = "http_error";
  let message = `service error (${resp.status})`;
  let minN: number | undefined;
  let fields: { field: string; message: string }[] | undefined;
  try {
    const payload = await resp.json();
    if (payload?.error) {
      code = payload.error.code ?? code;
      message = payload.error.message ?? message;
      minN = payload.error.min_N ?? undefined;
      fields = payload.error.details ?? undefined;
      if (!payload.error.message && fields) {
        message = fields.map((f) => `${f.field}: ${f.message}`).join("; ");
      }
    }
  } catch {
    // non-JSON body: keep defaults
  }
  return { status: resp.status, code, message, minN, fields };
}
