/** Display formatting for plan results; no statistics are computed here. */

import { PlanResponse } from "./api.js";

export function formatPercent(fraction: number, digits = 1): string {
  return `${(fraction * 100).toFixed(digits)}%`;
}

export function formatPower(p: number): string {
  return p.toFixed(3);
}

export interface PlanCard {
  headline: string;
  nStar: string;
  classical: string;
  reduction: string;
  reductionLabel: string;
  power: string;
  ruleOfThumb?: string;
  poolWarning?: string;
  groupNote?: string;
}

/** Pure view-model: every field is copied from the service response. */
export function planCard(resp: PlanResponse): PlanCard {
  const isTable = resp.n0 !== undefined;
  const nStar = isTable ? resp.n0! : resp.n_star!;
  const classical = isTable ? resp.classical_n0! : resp.classical_n!;
  const card: PlanCard = {
    headline: `${nStar} labels needed`,
    nStar: String(nStar),
    classical: String(classical),
    reduction: formatPercent(resp.reduction),
    reductionLabel: `${formatPercent(resp.reduction)} fewer labels than the classical design (${nStar} vs ${classical})`,
    power: formatPower(resp.analytic_power_at_n),
  };
  if (resp.rule_of_thumb_ratio !== undefined) {
    card.ruleOfThumb = `rule of thumb: ≈(1−R²)·classical = ${Math.round(
      resp.rule_of_thumb_ratio * classical,
    )}`;
  }
  if (resp.pool_exhausted) {
    card.poolWarning =
      "Plan exceeds the unlabeled pool: the variance formula stays valid, " +
      "but this fixed pool cannot supply that many predictions.";
  }
  if (resp.n_star_b !== undefined && resp.n_star_b !== resp.n_star) {
    card.groupNote = `per group: ${resp.n_star} / ${resp.n_star_b}`;
  }
  if (isTable && resp.n1 !== resp.n0) {
    card.groupNote = `control ${resp.n0}, treated ${resp.n1}`;
  }
  return card;
}
