// Pure SVG renderers. They return markup strings so they can be tested
// without a DOM; main.ts injects the strings into the page. Scaling is
// presentation geometry only, every plotted value is a response field.

import { clockLabel, dayLabel } from "./format.js";
import type { DailyPoint, WasteResponse } from "./types.js";

export interface ChartSize {
  width: number;
  height: number;
}

const MARGIN = { top: 18, right: 16, bottom: 28, left: 48 };

function escapeAttr(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/"/g, "&quot;").replace(/</g, "&lt;");
}

function yScale(max: number, height: number): (v: number) => number {
  const span = height - MARGIN.top - MARGIN.bottom;
  return (v) => MARGIN.top + span * (1 - (max > 0 ? v / max : 0));
}

export interface DailyBarsOptions extends ChartSize {
  baseline?: number | null;
  highlightWeekend?: boolean;
}

export function renderDailyBars(series: DailyPoint[], opts: DailyBarsOptions): string {
  const { width, height } = opts;
  const innerWidth = width - MARGIN.left - MARGIN.right;
  const values = series.map((p) => p.kwh ?? 0);
  const max = Math.max(1, ...values, opts.baseline ?? 0) * 1.1;
  const y = yScale(max, height);
  const slot = innerWidth / Math.max(1, series.length);
  const barWidth = slot * 0.7;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" class="daily-bars">`,
  );

  if (opts.baseline !== null && opts.baseline !== undefined) {
    const by = y(opts.baseline);
    const bottom = height - MARGIN.bottom;
    parts.push(
      `<rect class="baseline-band" x="${MARGIN.left}" y="${by.toFixed(1)}" ` +
        `width="${innerWidth}" height="${(bottom - by).toFixed(1)}" ` +
        `data-baseline-kwh="${opts.baseline}"/>`,
    );
    parts.push(
      `<line class="baseline-line" x1="${MARGIN.left}" x2="${width - MARGIN.right}" ` +
        `y1="${by.toFixed(1)}" y2="${by.toFixed(1)}"/>`,
    );
    parts.push(
      `<text class="baseline-label" x="${width - MARGIN.right}" y="${(by - 4).toFixed(1)}" ` +
        `text-anchor="end">baseline ${opts.baseline.toFixed(1)} kWh/day</text>`,
    );
  }

  series.forEach((point, i) => {
    const x = MARGIN.left + i * slot + (slot - barWidth) / 2;
    const label = dayLabel(point.date);
    if (point.kwh === null) {
      parts.push(
        `<rect class="bar gap" x="${x.toFixed(1)}" y="${MARGIN.top}" ` +
          `width="${barWidth.toFixed(1)}" height="${height - MARGIN.top - MARGIN.bottom}" ` +
          `data-date="${point.date}" data-kwh=""/>`,
      );
    } else {
      const top = y(point.kwh);
      const weekend = point.flags.includes("weekend");
      parts.push(
        `<rect class="bar${weekend ? " weekend" : ""}" x="${x.toFixed(1)}" ` +
          `y="${top.toFixed(1)}" width="${barWidth.toFixed(1)}" ` +
          `height="${(height - MARGIN.bottom - top).toFixed(1)}" ` +
          `data-date="${point.date}" data-kwh="${point.kwh}"/>`,
      );
    }
    parts.push(
      `<text class="axis-label" x="${(x + barWidth / 2).toFixed(1)}" ` +
        `y="${height - 8}" text-anchor="middle">${escapeAttr(label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("");
}

export interface WasteChartOptions extends ChartSize {
  showThreshold: boolean;
  showHighlights: boolean;
}

function polyline(
  points: Array<{ x: number; y: number } | null>,
  className: string,
): string {
  // break the line at gaps instead of bridging them
  const segments: string[] = [];
  let current: string[] = [];
  for (const p of points) {
    if (p === null) {
      if (current.length > 1) segments.push(current.join(" "));
      current = [];
    } else {
      current.push(`${p.x.toFixed(1)},${p.y.toFixed(1)}`);
    }
  }
  if (current.length > 1) segments.push(current.join(" "));
  return segments
    .map((s) => `<polyline class="${className}" fill="none" points="${s}"/>`)
    .join("");
}

export function renderWasteChart(waste: WasteResponse, opts: WasteChartOptions): string {
  const { width, height } = opts;
  const innerWidth = width - MARGIN.left - MARGIN.right;
  const n = waste.lux_series.length;
  const xAt = (i: number) => MARGIN.left + (n > 1 ? (i / (n - 1)) * innerWidth : 0);
  const indexByTime = new Map(waste.lux_series.map((p, i) => [p.t, i]));

  const luxValues = waste.lux_series.map((p) => p.value ?? 0);
  const luxMax = Math.max(waste.lux_threshold * 1.25, ...luxValues) * 1.05;
  const luxY = yScale(luxMax, height);

  const powerValues = waste.power_series.map((p) => (p.value ?? 0) / 1000);
  const powerMax = Math.max(1, ...powerValues) * 1.3;
  const powerY = yScale(powerMax, height);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" class="waste-chart">`,
  );

  if (opts.showHighlights) {
    for (const iv of waste.intervals) {
      const startIdx = indexByTime.get(iv.start);
      const endIdx = indexByTime.get(iv.end);
      const x0 = startIdx !== undefined ? xAt(startIdx) : MARGIN.left;
      const x1 = endIdx !== undefined ? xAt(endIdx) : width - MARGIN.right;
      parts.push(
        `<rect class="waste-highlight" x="${x0.toFixed(1)}" y="${MARGIN.top}" ` +
          `width="${(x1 - x0).toFixed(1)}" height="${height - MARGIN.top - MARGIN.bottom}" ` +
          `data-start="${iv.start}" data-end="${iv.end}" ` +
          `data-savings-kwh="${iv.estimated_daily_savings_kwh}"/>`,
      );
    }
  }

  parts.push(
    polyline(
      waste.lux_series.map((p, i) =>
        p.value === null ? null : { x: xAt(i), y: luxY(p.value) },
      ),
      "lux-line",
    ),
  );
  parts.push(
    polyline(
      waste.power_series.map((p) => {
        const i = indexByTime.get(p.t);
        if (i === undefined || p.value === null) return null;
        return { x: xAt(i), y: powerY(p.value / 1000) };
      }),
      "power-line",
    ),
  );

  if (opts.showThreshold) {
    const ty = luxY(waste.lux_threshold);
    parts.push(
      `<line class="threshold-line" stroke="red" x1="${MARGIN.left}" ` +
        `x2="${width - MARGIN.right}" y1="${ty.toFixed(1)}" y2="${ty.toFixed(1)}" ` +
        `data-lux-threshold="${waste.lux_threshold}"/>`,
    );
    parts.push(
      `<text class="threshold-label" fill="red" x="${MARGIN.left + 4}" ` +
        `y="${(ty - 5).toFixed(1)}">${waste.lux_threshold} lux</text>`,
    );
  }

  const tickEvery = Math.max(1, Math.floor(n / 8));
  waste.lux_series.forEach((p, i) => {
    if (i % tickEvery === 0) {
      parts.push(
        `<text class="axis-label" x="${xAt(i).toFixed(1)}" y="${height - 8}" ` +
          `text-anchor="middle">${clockLabel(p.t)}</text>`,
      );
    }
  });

  parts.push("</svg>");
  return parts.join("");
}
