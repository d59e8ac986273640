import { PlanResponse } from "../src/api.js";

/** Real service response for the reference mean-design inputs. */
export function meanPlanFixture(): PlanResponse {
  const curve: [number, number][] = [];
  for (let i = 0; i < 100; i++) {
    const n = Math.round(1 + (203 * i) / 99);
    curve.push([n, Math.min(0.999, 0.059 + 0.0095 * (n - 1) ** 0.82)]);
  }
  return {
    design: "mean",
    method: "optimal",
    inputs: {
      sigma2: 1.0,
      rho2: 0.49,
      N: 5000.0,
      delta: 0.2,
      alpha: 0.05,
      power: 0.8,
      theta0: 0.0,
      conservative: false,
    },
    n_star: 102,
    classical_n: 197,
    reduction: 0.48223350253807107,
    analytic_power_at_n: 0.8000184990326581,
    lambda_star: 0.6860054880439044,
    pool_exhausted: false,
    rule_of_thumb_ratio: 0.51,
    curve,
  };
}

export function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
