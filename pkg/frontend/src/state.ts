// View state and its URL form. Anything on screen can be reproduced from
// the query string alone, so views are shareable links.

export type Resolution = "15min" | "1h" | "1day";

export interface Overlays {
  baseline: boolean;
  luxThreshold: boolean;
  wasteHighlights: boolean;
}

export interface ViewState {
  building: string | null;
  from: string | null;
  to: string | null;
  resolution: Resolution;
  overlays: Overlays;
  luxThresholdValue: number;
  markStart: string | null;
  markEnd: string | null;
}

export const DEFAULT_STATE: ViewState = {
  building: null,
  from: null,
  to: null,
  resolution: "1day",
  overlays: { baseline: true, luxThreshold: false, wasteHighlights: false },
  luxThresholdValue: 400,
  markStart: null,
  markEnd: null,
};

const RESOLUTIONS: Resolution[] = ["15min", "1h", "1day"];

export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.building) params.set("b", state.building);
  if (state.from) params.set("from", state.from);
  if (state.to) params.set("to", state.to);
  if (state.resolution !== DEFAULT_STATE.resolution) {
    params.set("res", state.resolution);
  }
  const overlayCodes = [
    state.overlays.baseline ? "b" : "",
    state.overlays.luxThreshold ? "l" : "",
    state.overlays.wasteHighlights ? "w" : "",
  ].join("");
  if (overlayCodes !== "b") params.set("ov", overlayCodes || "-");
  if (state.luxThresholdValue !== DEFAULT_STATE.luxThresholdValue) {
    params.set("lux", String(state.luxThresholdValue));
  }
  if (state.markStart) params.set("ms", state.markStart);
  if (state.markEnd) params.set("me", state.markEnd);
  return params.toString();
}

export function decodeState(query: string): ViewState {
  const params = new URLSearchParams(query);
  const res = params.get("res");
  const overlayCodes = params.get("ov");
  const lux = params.get("lux");
  return {
    building: params.get("b"),
    from: params.get("from"),
    to: params.get("to"),
    resolution: RESOLUTIONS.includes(res as Resolution)
      ? (res as Resolution)
      : DEFAULT_STATE.resolution,
    overlays: overlayCodes === null
      ? { ...DEFAULT_STATE.overlays }
      : {
          baseline: overlayCodes.includes("b"),
          luxThreshold: overlayCodes.includes("l"),
          wasteHighlights: overlayCodes.includes("w"),
        },
    luxThresholdValue: lux !== null && Number.isFinite(Number(lux))
      ? Number(lux)
      : DEFAULT_STATE.luxThresholdValue,
    markStart: params.get("ms"),
    markEnd: params.get("me"),
  };
}
