// Thin client over the documented HTTP surface. Failures carry the server's
// error body verbatim so views can surface the exact reason.

import type {
  ApiErrorBody,
  BaselineResponse,
  BuildingInfo,
  EnergyResponse,
  InterventionResponse,
  LiveResponse,
  ProgressResponse,
  WasteResponse,
} from "./types.js";

export class ApiRequestError extends Error {
  readonly status: number;
  readonly body: ApiErrorBody;

  constructor(status: number, body: ApiErrorBody) {
    super(`${body.error}: ${body.detail}`);
    this.status = status;
    this.body = body;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    const text = await response.text();
    const body = text ? JSON.parse(text) : null;
    if (!response.ok) {
      const error: ApiErrorBody =
        body && typeof body.error === "string"
          ? body
          : { error: `http_${response.status}`, detail: text };
      throw new ApiRequestError(response.status, error);
    }
    return body as T;
  }

  buildings(): Promise<BuildingInfo[]> {
    return this.request("/v1/buildings");
  }

  energy(building: string, resolution: string, from: string, to: string): Promise<EnergyResponse> {
    const params = new URLSearchParams({ resolution, from, to });
    return this.request(`/v1/buildings/${building}/energy?${params}`);
  }

  live(building: string, at?: string): Promise<LiveResponse> {
    const suffix = at ? `?${new URLSearchParams({ at })}` : "";
    return this.request(`/v1/buildings/${building}/live${suffix}`);
  }

  waste(
    building: string,
    day: string,
    threshold: number,
    options: { zone?: string; floorKw?: number; minimalKw?: number } = {},
  ): Promise<WasteResponse> {
    const params = new URLSearchParams({ day, threshold: String(threshold) });
    if (options.zone) params.set("zone", options.zone);
    if (options.floorKw !== undefined) params.set("floor_kw", String(options.floorKw));
    if (options.minimalKw !== undefined) params.set("minimal_kw", String(options.minimalKw));
    return this.request(`/v1/buildings/${building}/waste?${params}`);
  }

  contrast(building: string, from: string, to: string): Promise<unknown> {
    const params = new URLSearchParams({ from, to });
    return this.request(`/v1/buildings/${building}/contrast?${params}`);
  }

  progress(building: string): Promise<ProgressResponse> {
    return this.request(`/v1/buildings/${building}/progress`);
  }

  computeBaseline(building: string, body: unknown): Promise<BaselineResponse> {
    return this.request(`/v1/buildings/${building}/baseline`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  markIntervention(
    building: string,
    body: {
      baseline_id?: string;
      comparison: { week: string; baseline_id?: string };
      saving: { week: string; baseline_id?: string };
      notes?: string;
    },
  ): Promise<InterventionResponse> {
    return this.request(`/v1/buildings/${building}/interventions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }
}
