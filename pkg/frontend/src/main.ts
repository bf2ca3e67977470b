// Page wiring. Everything rendered here comes out of service responses;
// the modules this file glues together are the ones under test.

import { ApiClient, ApiRequestError } from "./api.js";
import { renderDailyBars, renderWasteChart } from "./chart.js";
import { kwhText, kwText } from "./format.js";
import { GuidedError, InterventionFlow } from "./intervention.js";
import { LivePoller } from "./live.js";
import { DEFAULT_STATE, decodeState, encodeState, type ViewState } from "./state.js";
import type { BuildingInfo, EnergyPoint, DailyPoint } from "./types.js";

const POLL_MS = 5000;

const api = new ApiClient("");
let state: ViewState = decodeState(window.location.search.replace(/^\?/, ""));
let buildings: BuildingInfo[] = [];
const poller = new LivePoller();
let flow: InterventionFlow | null = null;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function syncUrl(): void {
  const query = encodeState(state);
  window.history.replaceState(null, "", query ? `?${query}` : window.location.pathname);
}

function setState(patch: Partial<ViewState>): void {
  state = { ...state, ...patch };
  syncUrl();
  void refresh();
}

function currentBuilding(): BuildingInfo | null {
  return buildings.find((b) => b.building_id === state.building) ?? null;
}

async function refreshLive(): Promise<void> {
  if (!state.building) return;
  try {
    poller.onResult(await api.live(state.building));
  } catch {
    poller.onError();
  }
  const view = poller.view();
  const banner = $("live-banner");
  banner.className = `banner ${view.status}`;
  banner.textContent =
    view.status === "stale"
      ? "connection lost; showing the last received data"
      : view.status === "empty"
        ? "no data yet today"
        : view.status === "waiting"
          ? "waiting for the first live sample"
          : "live";
  if (view.data) {
    $("live-power").textContent = kwText(view.data.latest_power_w);
    $("live-today").textContent = kwhText(view.data.today_kwh);
    $("live-baseline").textContent =
      view.data.baseline_kwh_per_day === null
        ? "–"
        : `${view.data.baseline_kwh_per_day.toFixed(1)} kWh/day`;
  }
}

async function refreshEnergy(): Promise<void> {
  if (!state.building || !state.from || !state.to) return;
  const container = $("energy-chart");
  try {
    const body = await api.energy(state.building, state.resolution, state.from, state.to);
    if (body.series.length === 0) {
      container.innerHTML = '<p class="empty">no readings in this range</p>';
      return;
    }
    if (state.resolution === "1day") {
      const building = currentBuilding();
      const live = poller.view().data;
      const baseline = state.overlays.baseline
        ? (live?.baseline_kwh_per_day ?? null)
        : null;
      container.innerHTML = renderDailyBars(body.series as DailyPoint[], {
        width: 720,
        height: 260,
        baseline,
      });
    } else {
      container.innerHTML = renderSubDayList(body.series);
    }
  } catch (error) {
    container.innerHTML = `<p class="error">${describe(error)}</p>`;
  }
}

function renderSubDayList(series: EnergyPoint[]): string {
  const rows = series
    .map((p) => {
      const label = "start" in p ? p.start : p.date;
      const kwh = p.kwh === null ? "–" : p.kwh.toFixed(3);
      return `<tr><td>${label}</td><td class="num">${kwh}</td></tr>`;
    })
    .join("");
  return `<table class="series"><thead><tr><th>bucket</th><th>kWh</th></tr></thead><tbody>${rows}</tbody></table>`;
}

async function refreshWaste(): Promise<void> {
  const container = $("waste-chart");
  const summary = $("waste-summary");
  const building = currentBuilding();
  if (!building || building.lux_zones.length === 0) {
    container.innerHTML = '<p class="empty">no luminosity sensors in this building</p>';
    summary.textContent = "";
    return;
  }
  const day = (($("waste-day") as HTMLInputElement).value || state.to) ?? "";
  if (!day) return;
  try {
    const body = await api.waste(state.building!, day, state.luxThresholdValue);
    container.innerHTML = renderWasteChart(body, {
      width: 720,
      height: 260,
      showThreshold: state.overlays.luxThreshold,
      showHighlights: state.overlays.wasteHighlights,
    });
    summary.textContent = body.intervals.length
      ? `${body.intervals.length} interval(s); estimated ` +
        `${body.total_estimated_savings_kwh.toFixed(1)} kWh avoidable that day`
      : "no waste detected at this threshold";
  } catch (error) {
    container.innerHTML = `<p class="error">${describe(error)}</p>`;
    summary.textContent = "";
  }
}

async function refreshProgress(): Promise<void> {
  const container = $("progress-list");
  if (!state.building) return;
  try {
    const body = await api.progress(state.building);
    container.innerHTML = body.points
      .map((p) => {
        if (p.gap) return `<li>${p.week}: no usable data</li>`;
        const pct = p.reduction_vs_comparison === null
          ? "–"
          : `${Math.round(p.reduction_vs_comparison * 100)}%`;
        const tag = p.group_tag ? ` [${p.group_tag}]` : "";
        return `<li>${p.week}: reduction ${pct}${tag}</li>`;
      })
      .join("");
  } catch (error) {
    container.innerHTML = `<li class="muted">${describe(error)}</li>`;
  }
}

function describe(error: unknown): string {
  if (error instanceof GuidedError) return error.message;
  if (error instanceof ApiRequestError) return `${error.body.error}: ${error.body.detail}`;
  return error instanceof Error ? error.message : String(error);
}

async function refresh(): Promise<void> {
  await Promise.all([refreshLive(), refreshEnergy(), refreshWaste(), refreshProgress()]);
}

function wireControls(): void {
  const select = $("building-select") as HTMLSelectElement;
  select.addEventListener("change", () => setState({ building: select.value }));

  ($("range-from") as HTMLInputElement).addEventListener("change", (e) =>
    setState({ from: (e.target as HTMLInputElement).value || null }));
  ($("range-to") as HTMLInputElement).addEventListener("change", (e) =>
    setState({ to: (e.target as HTMLInputElement).value || null }));

  for (const res of ["15min", "1h", "1day"] as const) {
    $(`res-${res}`).addEventListener("click", () => setState({ resolution: res }));
  }

  const overlayBox = (id: string, key: keyof ViewState["overlays"]) => {
    const box = $(id) as HTMLInputElement;
    box.checked = state.overlays[key];
    box.addEventListener("change", () =>
      setState({ overlays: { ...state.overlays, [key]: box.checked } }));
  };
  overlayBox("overlay-baseline", "baseline");
  overlayBox("overlay-threshold", "luxThreshold");
  overlayBox("overlay-highlights", "wasteHighlights");

  const lux = $("lux-threshold") as HTMLInputElement;
  lux.value = String(state.luxThresholdValue);
  lux.addEventListener("change", () =>
    setState({ luxThresholdValue: Number(lux.value) || DEFAULT_STATE.luxThresholdValue }));

  $("mark-start").addEventListener("click", () => {
    const week = (($("mark-week") as HTMLInputElement).value || "").trim();
    if (!week || !flow) return;
    flow.markStart(week);
    setState({ markStart: week, markEnd: null });
    $("intervention-result").textContent = `intervention started in ${week}`;
  });

  $("mark-end").addEventListener("click", () =>

    void (async () => {
      const week = (($("mark-week") as HTMLInputElement).value || "").trim();
      const out = $("intervention-result");
      if (!week || !flow) return;
      const building = currentBuilding();
      const comparison = building?.pinned?.comparison_week ?? state.markStart;
      if (!comparison) {
        out.textContent = "mark a start week first";
        return;
      }
      try {
        flow.markEnd(week);
        setState({ markEnd: week });
        const notes = ($("intervention-notes") as HTMLTextAreaElement).value;
        const outcome = await flow.submit(comparison, { notes });
        out.textContent =
          `reduction ${outcome.display} ` +
          `(flexible ${outcome.result.comparison.flexible_kwh_per_day.toFixed(1)} ` +
          `→ ${outcome.result.saving.flexible_kwh_per_day.toFixed(1)} kWh/day)`;
      } catch (error) {
        out.textContent = describe(error);
      }
    })());
}

async function boot(): Promise<void> {
  buildings = await api.buildings();
  const select = $("building-select") as HTMLSelectElement;
  select.innerHTML = buildings
    .map((b) => `<option value="${b.building_id}">${b.name ?? b.building_id}</option>`)
    .join("");
  if (!state.building && buildings.length > 0) {
    state = { ...state, building: buildings[0]!.building_id };
  }
  if (state.building) select.value = state.building;
  if (state.building) flow = new InterventionFlow(api, state.building);
  if (state.markStart && flow) flow.markStart(state.markStart);

  ($("range-from") as HTMLInputElement).value = state.from ?? "";
  ($("range-to") as HTMLInputElement).value = state.to ?? "";

  wireControls();
  syncUrl();
  await refresh();
  window.setInterval(() => void refreshLive(), POLL_MS);
}

void boot();
