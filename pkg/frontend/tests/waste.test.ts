// Waste-view contract: red 400-lux threshold line plus the highlighted
// daylight interval, both taken verbatim from the recorded response.

import { describe, expect, it } from "vitest";

import { renderWasteChart } from "../src/chart.js";
import type { WasteResponse } from "../src/types.js";
import { fixture } from "./helpers.js";

const waste = fixture<WasteResponse>("waste.json");

describe("waste chart on the hall fixture", () => {
  const svg = renderWasteChart(waste, {
    width: 720,
    height: 260,
    showThreshold: true,
    showHighlights: true,
  });

  it("draws a red threshold line at the response's 400 lux", () => {
    expect(waste.lux_threshold).toBe(400.0);
    expect(svg).toContain('class="threshold-line" stroke="red"');
    expect(svg).toContain(`data-lux-threshold="${waste.lux_threshold}"`);
    expect(svg).toContain(`${waste.lux_threshold} lux`);
  });

  it("highlights the detected interval (10:00-17:00 local, 09:00-16:00Z)", () => {
    expect(waste.intervals).toHaveLength(1);
    const interval = waste.intervals[0]!;
    expect(interval.start).toBe("2019-03-12T09:00:00Z");
    expect(interval.end).toBe("2019-03-12T16:00:00Z");
    expect(svg).toContain('class="waste-highlight"');
    expect(svg).toContain(`data-start="${interval.start}"`);
    expect(svg).toContain(`data-end="${interval.end}"`);
    expect(svg).toContain(`data-savings-kwh="${interval.estimated_daily_savings_kwh}"`);
  });

  it("fixture interval is worth 21 kWh over 7 hours", () => {
    const interval = waste.intervals[0]!;
    expect(interval.duration_hours).toBeCloseTo(7.0, 9);
    expect(interval.estimated_daily_savings_kwh).toBeCloseTo(21.0, 6);
  });

  it("plots both series", () => {
    expect(svg).toContain('class="lux-line"');
    expect(svg).toContain('class="power-line"');
  });

  it("hides threshold and highlights when toggled off", () => {
    const bare = renderWasteChart(waste, {
      width: 720,
      height: 260,
      showThreshold: false,
      showHighlights: false,
    });
    expect(bare).not.toContain("threshold-line");
    expect(bare).not.toContain("waste-highlight");
  });

  it("breaks the lux line at gaps instead of bridging them", () => {
    const holed: WasteResponse = {
      ...waste,
      lux_series: waste.lux_series.map((p, i) =>
        i === 40 ? { ...p, value: null } : p,
      ),
    };
    const svgHoled = renderWasteChart(holed, {
      width: 720,
      height: 260,
      showThreshold: false,
      showHighlights: false,
    });
    const luxSegments = svgHoled.match(/class="lux-line"/g) ?? [];
    expect(luxSegments.length).toBeGreaterThan(1);
  });
});
