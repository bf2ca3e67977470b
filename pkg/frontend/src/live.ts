// Live-view polling model: concurrent responses resolve by
// latest-timestamp-wins, and silence degrades to a stale-data banner
// (the last good numbers stay up, they are never replaced with zeros).

import type { LiveResponse } from "./types.js";

export type LiveStatus = "waiting" | "live" | "stale" | "empty";

export interface LiveView {
  status: LiveStatus;
  data: LiveResponse | null;
  lastSuccessMs: number | null;
}

export interface LivePollerOptions {
  staleAfterMs?: number;
  now?: () => number;
}

export class LivePoller {
  private data: LiveResponse | null = null;
  private lastSuccessMs: number | null = null;
  private readonly staleAfterMs: number;
  private readonly now: () => number;

  constructor(options: LivePollerOptions = {}) {
    this.staleAfterMs = options.staleAfterMs ?? 15_000;
    this.now = options.now ?? Date.now;
  }

  onResult(response: LiveResponse): void {
    // poll answers may arrive out of order; keep the newest service timestamp
    if (this.data === null || response.at >= this.data.at) {
      this.data = response;
    }
    this.lastSuccessMs = this.now();
  }

  onError(): void {
    // keep showing the last good data; view() reports staleness by age
  }

  view(): LiveView {
    if (this.data === null) {
      return { status: "waiting", data: null, lastSuccessMs: this.lastSuccessMs };
    }
    const fresh =
      this.lastSuccessMs !== null && this.now() - this.lastSuccessMs < this.staleAfterMs;
    if (!fresh) {
      return { status: "stale", data: this.data, lastSuccessMs: this.lastSuccessMs };
    }
    if (this.data.latest_power_w === null && this.data.today_kwh === null) {
      return { status: "empty", data: this.data, lastSuccessMs: this.lastSuccessMs };
    }
    return { status: "live", data: this.data, lastSuccessMs: this.lastSuccessMs };
  }
}
