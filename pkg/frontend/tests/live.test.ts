// Live polling model: newest service timestamp wins, connection loss shows
// stale data (never zeros), an empty store is an explicit empty state.

import { describe, expect, it } from "vitest";

import { LivePoller } from "../src/live.js";
import type { LiveResponse } from "../src/types.js";
import { fixture } from "./helpers.js";

const recorded = fixture<LiveResponse>("live.json");

function at(iso: string, power: number | null, kwh: number | null): LiveResponse {
  return { ...recorded, at: iso, latest_power_w: power, today_kwh: kwh };
}

describe("live poller", () => {
  it("starts waiting", () => {
    const poller = new LivePoller({ now: () => 0 });
    expect(poller.view().status).toBe("waiting");
  });

  it("shows the recorded live sample", () => {
    let clock = 0;
    const poller = new LivePoller({ now: () => clock });
    poller.onResult(recorded);
    expect(poller.view().status).toBe("live");
    expect(poller.view().data?.latest_power_w).toBe(recorded.latest_power_w);
    expect(poller.view().data?.baseline_kwh_per_day).toBe(recorded.baseline_kwh_per_day);
  });

  it("resolves concurrent responses by latest timestamp", () => {
    const poller = new LivePoller({ now: () => 0 });
    const newer = at("2018-11-21T11:00:05Z", 21000, 98.0);
    const older = at("2018-11-21T11:00:00Z", 22461, 97.7);
    poller.onResult(newer);
    poller.onResult(older); // late arrival of the earlier poll
    expect(poller.view().data?.at).toBe(newer.at);
    expect(poller.view().data?.latest_power_w).toBe(21000);
  });

  it("goes stale on silence but keeps the last numbers", () => {
    let clock = 0;
    const poller = new LivePoller({ staleAfterMs: 15_000, now: () => clock });
    poller.onResult(recorded);
    clock = 60_000;
    poller.onError();
    const view = poller.view();
    expect(view.status).toBe("stale");
    expect(view.data?.latest_power_w).toBe(recorded.latest_power_w); // not zeroed
  });

  it("recovers from stale on the next good poll", () => {
    let clock = 0;
    const poller = new LivePoller({ staleAfterMs: 15_000, now: () => clock });
    poller.onResult(recorded);
    clock = 60_000;
    expect(poller.view().status).toBe("stale");
    poller.onResult(at("2018-11-21T11:01:00Z", 21500, 99.0));
    expect(poller.view().status).toBe("live");
  });

  it("reports an empty store as empty, not as zeros", () => {
    const poller = new LivePoller({ now: () => 0 });
    poller.onResult(at("2019-06-01T12:00:00Z", null, null));
    const view = poller.view();
    expect(view.status).toBe("empty");
    expect(view.data?.today_kwh).toBeNull();
  });
});
