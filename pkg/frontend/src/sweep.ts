/**
 * What-if sweeps: overlay up to five plan curves while one field varies.
 *
 * The sweep fans one request per value through the service; every curve
 * and annotation in the overlay comes from those responses.
 */

import { DesignId, PlanRequest, PlanResponse, PlanServiceClient } from "./api.js";
import { Curve, MAX_CURVES } from "./chart.js";

export interface SweepResult {
  field: string;
  curves: Curve[];
  /** n* per sweep value, for monotonicity displays. */
  nStars: number[];
  /** Rule-of-thumb ratios echoed by the service (rho2 sweeps only). */
  ruleOfThumb?: { value: number; ratio: number }[];
}

export function sweepValues(from: number, to: number, count: number): number[] {
  const k = Math.max(2, Math.min(MAX_CURVES, Math.floor(count)));
  if (!(to > from)) throw new Error("degenerate sweep range");
  return Array.from({ length: k }, (_, i) => from + ((to - from) * i) / (k - 1));
}

export async function runSweep(
  client: PlanServiceClient,
  design: DesignId,
  base: PlanRequest,
  field: string,
  values: number[],
): Promise<SweepResult> {
  if (values.length > MAX_CURVES) {
    throw new Error(`a sweep overlays at most ${MAX_CURVES} curves`);
  }
  const responses: PlanResponse[] = [];
  for (const value of values) {
    const body = { ...(base as unknown as Record<string, unknown>), [field]: value } as unknown as PlanRequest;
    responses.push(await client.plan(design, body));
  }
  const curves = responses.map((resp, i) => ({
    label: `${field} = ${trim(values[i])}`,
    points: resp.curve,
  }));
  const nStars = responses.map((r) => (r.n_star ?? r.n0)!);
  const result: SweepResult = { field, curves, nStars };
  if (field === "rho2") {
    result.ruleOfThumb = responses.map((r, i) => ({
      value: values[i],
      ratio: r.rule_of_thumb_ratio!,
    }));
  }
  return result;
}

function trim(v: number): string {
  return Number(v.toFixed(4)).toString();
}
