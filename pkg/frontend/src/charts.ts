/** Minimal canvas line charts. Values are drawn exactly as sampled; the RB
 * chart uses step-after interpolation because capacities switch, not glide. */

import type { Sample } from "./types.js";

export interface SeriesSpec {
  label: string;
  color: string;
  samples: Sample[];
  step?: boolean;
}

export interface ChartBounds {
  t0: number;
  t1: number;
  v0: number;
  v1: number;
}

export function chartBounds(series: SeriesSpec[], padFraction = 0.08): ChartBounds {
  let t0 = Infinity,
    t1 = -Infinity,
    v0 = Infinity,
    v1 = -Infinity;
  for (const spec of series) {
    for (const [t, v] of spec.samples) {
      if (t < t0) t0 = t;
      if (t > t1) t1 = t;
      if (v < v0) v0 = v;
      if (v > v1) v1 = v;
    }
  }
  if (!isFinite(t0)) return { t0: 0, t1: 1, v0: 0, v1: 1 };
  if (t0 === t1) t1 = t0 + 1;
  if (v0 === v1) {
    v0 -= 0.5;
    v1 += 0.5;
  }
  const pad = (v1 - v0) * padFraction;
  return { t0, t1, v0: Math.min(0, v0), v1: v1 + pad };
}

const MARGIN = { left: 44, right: 8, top: 18, bottom: 18 };

export function drawChart(
  canvas: HTMLCanvasElement,
  title: string,
  series: SeriesSpec[],
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#8b949e";
  ctx.font = "11px sans-serif";
  ctx.fillText(title, MARGIN.left, 12);

  const bounds = chartBounds(series);
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const x = (t: number) => MARGIN.left + ((t - bounds.t0) / (bounds.t1 - bounds.t0)) * plotW;
  const y = (v: number) =>
    MARGIN.top + plotH - ((v - bounds.v0) / (bounds.v1 - bounds.v0)) * plotH;

  ctx.strokeStyle = "#30363d";
  ctx.beginPath();
  ctx.moveTo(MARGIN.left, MARGIN.top);
  ctx.lineTo(MARGIN.left, MARGIN.top + plotH);
  ctx.lineTo(MARGIN.left + plotW, MARGIN.top + plotH);
  ctx.stroke();

  ctx.fillStyle = "#8b949e";
  ctx.fillText(format(bounds.v1), 2, y(bounds.v1) + 4);
  ctx.fillText(format(bounds.v0), 2, y(bounds.v0) + 4);
  ctx.fillText(`t=${format(bounds.t0)}`, MARGIN.left, height - 4);
  const endLabel = `t=${format(bounds.t1)}`;
  ctx.fillText(endLabel, MARGIN.left + plotW - ctx.measureText(endLabel).width, height - 4);

  let legendX = MARGIN.left + 70;
  for (const spec of series) {
    if (spec.samples.length === 0) continue;
    ctx.strokeStyle = spec.color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    spec.samples.forEach(([t, v], i) => {
      const px = x(t);
      const py = y(v);
      if (i === 0) {
        ctx.moveTo(px, py);
      } else if (spec.step) {
        ctx.lineTo(px, y(spec.samples[i - 1][1]));
        ctx.lineTo(px, py);
      } else {
        ctx.lineTo(px, py);
      }
    });
    ctx.stroke();
    ctx.fillStyle = spec.color;
    ctx.fillText(spec.label, legendX, 12);
    legendX += ctx.measureText(spec.label).width + 14;
  }
}

function format(value: number): string {
  if (Math.abs(value) >= 1000) return value.toFixed(0);
  return Number.isInteger(value) ? String(value) : value.toFixed(1);
}
