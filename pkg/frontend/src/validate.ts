/**
 * Client-side form validation mirroring the service schema.
 *
 * The ranges here are exactly the server's invariants; a request that
 * passes this validation must never draw a 400 from the service.
 */

import { DesignId, PlanRequest } from "./api.js";

export interface FieldError {
  field: string;
  message: string;
}

const prob = (v: number) => v > 0 && v < 1;

export function validateCommon(form: Record<string, number | undefined>): FieldError[] {
  const errors: FieldError[] = [];
  const alpha = form.alpha ?? 0.05;
  const power = form.power ?? 0.8;
  if (!prob(alpha)) errors.push({ field: "alpha", message: "must be in (0, 1)" });
  if (!prob(power)) errors.push({ field: "power", message: "must be in (0, 1)" });
  if (prob(alpha) && prob(power) && power <= alpha) {
    errors.push({ field: "power", message: "must exceed alpha" });
  }
  return errors;
}

function validateCalibration(form: Record<string, number | undefined>): FieldError[] {
  const errors: FieldError[] = [];
  const paths = [
    form.rho2 !== undefined,
    form.mse !== undefined,
    form.p !== undefined || form.se !== undefined || form.sp !== undefined,
  ].filter(Boolean).length;
  if (paths !== 1) {
    errors.push({
      field: "calibration",
      message: "choose exactly one of R², MSE, or se/sp metrics",
    });
    return errors;
  }
  if (form.rho2 !== undefined && !(form.rho2 >= 0 && form.rho2 <= 1)) {
    errors.push({ field: "rho2", message: "must be in [0, 1]" });
  }
  if (form.mse !== undefined && !(form.mse >= 0)) {
    errors.push({ field: "mse", message: "must be nonnegative" });
  }
  if (form.rho2 !== undefined || form.mse !== undefined) {
    if (!(form.sigma2 !== undefined && form.sigma2 > 0)) {
      errors.push({ field: "sigma2", message: "must be positive" });
    }
  }
  if (form.p !== undefined || form.se !== undefined || form.sp !== undefined) {
    if (form.p === undefined || !prob(form.p)) {
      errors.push({ field: "p", message: "prevalence must be in (0, 1)" });
    }
    for (const key of ["se", "sp"] as const) {
      const v = form[key];
      if (v === undefined || !(v >= 0 && v <= 1)) {
        errors.push({ field: key, message: "must be in [0, 1]" });
      }
    }
  }
  return errors;
}

function validateMeanFamily(form: Record<string, number | undefined>): FieldError[] {
  const errors = [...validateCommon(form), ...validateCalibration(form)];
  if (!(form.N !== undefined && form.N >= 1)) {
    errors.push({ field: "N", message: "pool size must be at least 1" });
  }
  if (form.delta === undefined || form.delta === 0 || !isFinite(form.delta)) {
    errors.push({ field: "delta", message: "effect size must be nonzero" });
  }
  return errors;
}

function validateTwoByTwo(form: Record<string, number | undefined>): FieldError[] {
  const errors = validateCommon(form);
  for (const key of ["p0", "p1"] as const) {
    const v = form[key];
    if (v === undefined || !prob(v)) {
      errors.push({ field: key, message: "must be in (0, 1)" });
    }
  }
  if (form.p0 !== undefined && form.p0 === form.p1) {
    errors.push({ field: "p1", message: "must differ from p0 (zero effect)" });
  }
  const haveRho = form.rho0 !== undefined || form.rho1 !== undefined;
  const haveSeSp = form.se !== undefined || form.sp !== undefined;
  if (haveRho === haveSeSp) {
    errors.push({
      field: "calibration",
      message: "choose exactly one of rho0/rho1 or se/sp",
    });
  } else if (haveRho) {
    for (const key of ["rho0", "rho1"] as const) {
      const v = form[key];
      if (v === undefined || Math.abs(v) > 1) {
        errors.push({ field: key, message: "must be in [-1, 1]" });
      }
    }
  } else {
    for (const key of ["se", "sp"] as const) {
      const v = form[key];
      if (v === undefined || !(v >= 0 && v <= 1)) {
        errors.push({ field: key, message: "must be in [0, 1]" });
      }
    }
  }
  if (form.kappa !== undefined && !(form.kappa > 0)) {
    errors.push({ field: "kappa", message: "must be positive" });
  }
  return errors;
}

function validateRegression(form: Record<string, number | undefined>): FieldError[] {
  const errors = validateCommon(form);
  const { v_yy, v_ff, v_yf } = form;
  if (v_yy === undefined || v_yy < 0) {
    errors.push({ field: "v_yy", message: "must be nonnegative" });
  }
  if (v_ff === undefined || v_ff < 0) {
    errors.push({ field: "v_ff", message: "must be nonnegative" });
  }
  if (
    v_yy !== undefined &&
    v_ff !== undefined &&
    v_yf !== undefined &&
    v_yf * v_yf > v_yy * v_ff * (1 + 1e-12)
  ) {
    errors.push({
      field: "v_yf",
      message: "violates Cauchy-Schwarz: v_yf² must not exceed v_yy·v_ff",
    });
  }
  if (!(form.N !== undefined && form.N >= 1)) {
    errors.push({ field: "N", message: "pool size must be at least 1" });
  }
  if (form.delta === undefined || form.delta === 0) {
    errors.push({ field: "delta", message: "effect size must be nonzero" });
  }
  return errors;
}

export function validateForm(
  design: DesignId,
  form: Record<string, number | undefined>,
): FieldError[] {
  switch (design) {
    case "two-by-two":
      return validateTwoByTwo(form);
    case "regression":
      return validateRegression(form);
    default:
      return validateMeanFamily(form);
  }
}

/** Strip undefined values so the request carries no unknown/null fields. */
export function toRequestBody(form: Record<string, number | string | undefined>): PlanRequest {
  const body: Record<string, number | string> = {};
  for (const [key, value] of Object.entries(form)) {
    if (value !== undefined && value !== "") body[key] = value;
  }
  return body as unknown as PlanRequest;
}
