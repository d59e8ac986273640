/**
 * Power-vs-n chart rendered as an SVG string.
 *
 * Pure string building: testable without a DOM.  Curve points come
 * straight from service responses; the only arithmetic here is pixel
 * scaling.
 */

export interface Curve {
  label: string;
  points: [number, number][];
}

export const MAX_CURVES = 5;
export const PALETTE = ["#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed"];

const MARGIN = { left: 46, right: 12, top: 12, bottom: 34 };

export interface ChartOptions {
  width?: number;
  height?: number;
  targetPower?: number;
}

export function renderChart(curves: Curve[], opts: ChartOptions = {}): string {
  const width = opts.width ?? 560;
  const height = opts.height ?? 300;
  const shown = curves.slice(0, MAX_CURVES);
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const maxN = Math.max(1, ...shown.flatMap((c) => c.points.map((p) => p[0])));

  const sx = (n: number) => MARGIN.left + (plotW * (n - 1)) / Math.max(1, maxN - 1);
  const sy = (p: number) => MARGIN.top + plotH * (1 - p);

  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" role="img" aria-label="power versus labeled sample size">`,
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#d4d4d8"/>`,
  ];

  for (const tick of [0, 0.25, 0.5, 0.75, 1]) {
    const y = sy(tick);
    parts.push(
      `<line x1="${MARGIN.left - 4}" y1="${y}" x2="${MARGIN.left}" y2="${y}" stroke="#71717a"/>`,
      `<text x="${MARGIN.left - 8}" y="${y + 4}" text-anchor="end" font-size="11" fill="#52525b">${tick.toFixed(2)}</text>`,
    );
  }
  for (const frac of [0, 0.25, 0.5, 0.75, 1]) {
    const n = Math.round(1 + frac * (maxN - 1));
    const x = sx(n);
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top + plotH}" x2="${x}" y2="${MARGIN.top + plotH + 4}" stroke="#71717a"/>`,
      `<text x="${x}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" font-size="11" fill="#52525b">${n}</text>`,
    );
  }
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 4}" text-anchor="middle" font-size="12" fill="#3f3f46">labeled sample size n</text>`,
  );

  if (opts.targetPower !== undefined) {
    const y = sy(opts.targetPower);
    parts.push(
      `<line class="target-line" x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + plotW}" y2="${y}" stroke="#9f1239" stroke-dasharray="6 4"/>`,
      `<text x="${MARGIN.left + plotW - 4}" y="${y - 5}" text-anchor="end" font-size="11" fill="#9f1239">target ${opts.targetPower}</text>`,
    );
  }

  shown.forEach((curve, i) => {
    const color = PALETTE[i % PALETTE.length];
    const d = curve.points
      .map(([n, p], idx) => `${idx === 0 ? "M" : "L"}${sx(n).toFixed(1)},${sy(p).toFixed(1)}`)
      .join(" ");
    parts.push(`<path class="curve" d="${d}" fill="none" stroke="${color}" stroke-width="2"/>`);
  });

  shown.forEach((curve, i) => {
    const color = PALETTE[i % PALETTE.length];
    const y = MARGIN.top + 14 + 16 * i;
    parts.push(
      `<line x1="${MARGIN.left + 8}" y1="${y - 4}" x2="${MARGIN.left + 28}" y2="${y - 4}" stroke="${color}" stroke-width="2"/>`,
      `<text class="legend" x="${MARGIN.left + 34}" y="${y}" font-size="11" fill="#3f3f46">${escapeXml(curve.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("");
}

function escapeXml(s: string): string {
  return s
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
